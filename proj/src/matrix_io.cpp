#include "orbitgeo/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace orbitgeo::io {

std::string format_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::format, "cannot serialise a non-finite value");
  std::string s = fmt::format("{:.17g}", x);
  // Keep a float marker so "-0" stays negative zero when read back.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string matrix_to_json(const Matrix& a) {
  require_square(a, "matrix_to_json");
  std::string out = fmt::format("{{\"n\": {}, \"entries\": [", a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i != 0 || j != 0) out += ", ";
      out += fmt::format("[{}, {}]", format_double(a(i, j).real()), format_double(a(i, j).imag()));
    }
  }
  out += "]}";
  return out;
}

Matrix matrix_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::format, std::string("matrix JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("entries"))
    throw Error(ErrorKind::format, "matrix JSON: expected an object with \"n\" and \"entries\"");
  const auto& jn = doc["n"];
  if (!jn.is_number_integer() || jn.get<long long>() < 0)
    throw Error(ErrorKind::format, "matrix JSON: \"n\" must be a nonnegative integer");
  const long long n = jn.get<long long>();
  const auto& entries = doc["entries"];
  if (!entries.is_array()) throw Error(ErrorKind::format, "matrix JSON: \"entries\" must be an array");
  if (static_cast<long long>(entries.size()) != n * n)
    throw Error(ErrorKind::format, fmt::format("matrix JSON: {} entries for n={} (expected {})", entries.size(), n, n * n));

  Matrix a(n, n);
  for (long long k = 0; k < n * n; ++k) {
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw Error(ErrorKind::format, fmt::format("matrix JSON: entry {} is not a [re, im] pair", k));
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw Error(ErrorKind::format, fmt::format("matrix JSON: entry {} is not finite", k));
    a(k / n, k % n) = Complex(re, im);
  }
  return a;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix(const std::filesystem::path& path, const Matrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::format, "cannot write " + path.string());
  out << matrix_to_json(a) << '\n';
}

Matrix read_matrix(const std::filesystem::path& path) { return matrix_from_json(read_text(path)); }

}  // namespace orbitgeo::io
