#include "annulus/tuple_io.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace annulus {

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  return Json{{"dim", m.rows()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("data")) {
    throw InvalidInputError("operator entry must be an object with \"dim\" and \"data\"");
  }
  const auto dim = j.at("dim").get<Eigen::Index>();
  if (dim < 1) throw InvalidInputError("operator dim must be positive");
  const Json& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != dim * dim) {
    throw InvalidInputError("operator data must hold dim^2 = " + std::to_string(dim * dim) +
                            " complex entries, got " + std::to_string(data.size()));
  }
  ComplexMatrix m(dim, dim);
  for (Eigen::Index k = 0; k < dim * dim; ++k) {
    const Json& cell = data.at(k);
    if (!cell.is_array() || cell.size() != 2 || !cell.at(0).is_number() ||
        !cell.at(1).is_number()) {
      throw InvalidInputError("operator data entry " + std::to_string(k) +
                              " must be a [re, im] pair");
    }
    m(k / dim, k % dim) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
  }
  require_finite(m, "tuple file");
  return m;
}

Json basis_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json tuple_to_json(const OperatorTuple& tuple) {
  Json ops = Json::array();
  for (const auto& op : tuple.ops) ops.push_back(matrix_to_json(op));
  return Json{{"r", tuple.r}, {"operators", std::move(ops)}};
}

OperatorTuple tuple_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("r") || !j.contains("operators")) {
    throw InvalidInputError("tuple file must be an object with \"r\" and \"operators\"");
  }
  OperatorTuple tuple;
  tuple.r = j.at("r").get<double>();
  const Json& ops = j.at("operators");
  if (!ops.is_array() || ops.empty()) {
    throw InvalidInputError("tuple file needs a nonempty \"operators\" array");
  }
  for (const auto& entry : ops) tuple.ops.push_back(matrix_from_json(entry));
  Eigen::Index dim = tuple.ops.front().rows();
  for (const auto& op : tuple.ops) {
    if (op.rows() != dim) throw InvalidInputError("operators must share one dimension");
  }
  return tuple;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

LoadedTuple load_tuple_file(const std::filesystem::path& path,
                            std::optional<double> r_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string bytes = buffer.str();

  Json parsed;
  try {
    parsed = Json::parse(bytes);
  } catch (const Json::parse_error& err) {
    throw InvalidInputError("json parse error in " + path.string() + ": " + err.what());
  }
  LoadedTuple out;
  out.tuple = tuple_from_json(parsed);
  out.digest = digest_hex(bytes);
  out.file_r = out.tuple.r;
  if (r_override) {
    out.r_overridden = std::abs(*r_override - out.tuple.r) > 0.0;
    out.tuple.r = *r_override;
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInputError("cannot write " + tmp.string());
    f << text;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

double env_or(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  char* end = nullptr;
  double v = std::strtod(raw, &end);
  if (end == raw) throw InvalidInputError(std::string(name) + ": not a number: " + raw);
  return v;
}

}  // namespace

ToleranceConfig tolerances_from_env() {
  ToleranceConfig tol;
  tol.eq_tol = env_or("ANNULUS_TOL_EQ", tol.eq_tol);
  tol.psd_tol = env_or("ANNULUS_TOL_PSD", tol.psd_tol);
  tol.kernel_tol = env_or("ANNULUS_TOL_KER", tol.kernel_tol);
  tol.validate();
  return tol;
}

Json tolerances_to_json(const ToleranceConfig& tol) {
  return Json{{"eq_tol", tol.eq_tol}, {"psd_tol", tol.psd_tol}, {"kernel_tol", tol.kernel_tol}};
}

Json make_report(const std::string& command, const std::string& input_digest,
                 const ToleranceConfig& tol, Json results, const std::string& status) {
  return Json{{"command", command},
              {"input_digest", input_digest},
              {"tolerances", tolerances_to_json(tol)},
              {"results", std::move(results)},
              {"status", status}};
}

}  // namespace annulus
