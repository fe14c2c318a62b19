#include "ousg/report_io.hpp"

#include <json.hpp>

#include <cstdio>

namespace ousg {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from(const json& j, const std::string& name) {
  require(j.is_array() && !j.empty() && j.front().is_array(),
          name + " must be an array of arrays");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  require(cols > 0, name + " must have nonempty rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() &&
                static_cast<Eigen::Index>(row.size()) == cols,
            name + " rows must all have the same length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& cell = row[static_cast<std::size_t>(k)];
      require(cell.is_number(), name + " entries must be numbers");
      m(i, k) = cell.get<double>();
    }
  }
  return m;
}

json parse(const std::string& text) {
  json j = json::parse(text);  // throws json::parse_error on bad input
  return j;
}

void reject_unknown(const json& j,
                    const std::vector<std::string>& allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const std::string& k : allowed) ok = ok || item.key() == k;
    require(ok, "unknown key \"" + item.key() + "\" in parameter JSON");
  }
}

json grid_row_json(const GridRow& r) {
  return json{{"s", r.s},         {"x_norm", r.x_norm},
              {"y_norm", r.y_norm}, {"angle", r.angle},
              {"region", r.region}, {"kernel", r.kernel},
              {"bound", r.bound},   {"ratio", r.ratio}};
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

OUParams params_from_json(const std::string& text) {
  const json j = parse(text);
  require(j.is_object(), "parameter JSON must be an object");
  if (j.contains("alpha") || j.contains("R")) {
    reject_unknown(j, {"alpha", "R"});
    require(j.contains("alpha") && j.contains("R"),
            "rotation shorthand needs both \"alpha\" and \"R\"");
    require(j["alpha"].is_number(), "\"alpha\" must be a number");
    return ou_params_from_rotation(j["alpha"].get<double>(),
                                   matrix_from(j["R"], "\"R\""));
  }
  reject_unknown(j, {"Q", "B"});
  require(j.contains("Q") && j.contains("B"),
          "parameter JSON needs \"Q\" and \"B\" (or \"alpha\" and \"R\")");
  return make_ou_params(matrix_from(j["Q"], "\"Q\""),
                        matrix_from(j["B"], "\"B\""));
}

BlockSpec block_spec_from_json(const std::string& text) {
  const json j = parse(text);
  require(j.is_object() && j.contains("theta"),
          "block spec JSON needs a \"theta\" array");
  reject_unknown(j, {"theta", "dim"});
  require(j["theta"].is_array(), "\"theta\" must be an array of numbers");
  std::vector<double> theta;
  for (const auto& v : j["theta"]) {
    require(v.is_number(), "\"theta\" entries must be numbers");
    theta.push_back(v.get<double>());
  }
  Eigen::Index dim = 2 * static_cast<Eigen::Index>(theta.size());
  if (j.contains("dim")) {
    require(j["dim"].is_number_integer(), "\"dim\" must be an integer");
    dim = j["dim"].get<Eigen::Index>();
  }
  return make_block_spec(std::move(theta), dim);
}

bool json_is_block_spec(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  return j.is_object() && j.contains("theta");
}

Matrix matrix_from_json(const std::string& text) {
  const json j = parse(text);
  if (j.is_object()) {
    reject_unknown(j, {"R"});
    require(j.contains("R"), "matrix JSON needs \"R\" or a bare array");
    return matrix_from(j["R"], "\"R\"");
  }
  return matrix_from(j, "matrix");
}

std::string to_json(const OUParams& p) {
  return json{{"Q", matrix_json(p.q)}, {"B", matrix_json(p.b)}}.dump(2);
}

std::string to_json(const CanonicalForm& c) {
  return json{{"g", matrix_json(c.g)},
              {"theta", c.theta},
              {"dim", c.dim}}
      .dump(2);
}

std::string to_json(const StandardForm& f) {
  return json{{"m", matrix_json(f.m)},
              {"d_lambda", vector_json(f.d_lambda)},
              {"b_tilde", matrix_json(f.b_tilde)},
              {"r", matrix_json(f.r)}}
      .dump(2);
}

std::string to_json(const NormalityReport& r) {
  return json{{"normal", r.normal},
              {"sym_defect", r.sym_defect},
              {"commute_defect", r.commute_defect},
              {"generator_defect", r.generator_defect},
              {"tolerance", r.tolerance},
              {"form", json::parse(to_json(r.form))}}
      .dump(2);
}

std::string to_json(const BuildingBlocks& b) {
  json blocks = json::array();
  for (std::size_t i = 0; i < b.alpha.size(); ++i)
    blocks.push_back(json{{"alpha", b.alpha[i]},
                          {"coords", b.coords[i]},
                          {"r", matrix_json(b.r_block[i])}});
  return json{{"blocks", std::move(blocks)}}.dump(2);
}

std::string to_json(const ScanResult& r) {
  return json{{"sup", r.sup}, {"argmax_t", r.argmax_t}}.dump(2);
}

std::string to_json(const SplitScan& s) {
  return json{{"local", {{"sup", s.local.sup}, {"argmax_t", s.local.argmax_t}}},
              {"global",
               {{"sup", s.global.sup}, {"argmax_t", s.global.argmax_t}}}}
      .dump(2);
}

std::string to_json(const CertificationReport& r) {
  json violations = json::array();
  for (const GridRow& row : r.violations) {
    violations.push_back(grid_row_json(row));
    if (violations.size() >= 32) break;
  }
  return json{{"name", r.name},
              {"pass", r.pass},
              {"constant", r.constant},
              {"exponent_constant", r.exponent_constant},
              {"worst_ratio", r.worst_ratio},
              {"stability", r.stability},
              {"worst_row", grid_row_json(r.worst_row)},
              {"violation_count", r.violations.size()},
              {"violations", std::move(violations)},
              {"notes", r.notes},
              {"row_count", r.rows.size()}}
      .dump(2);
}

std::string to_json(const PeriodResult& r) {
  return json{{"periodic", r.periodic}, {"period", r.period}}.dump(2);
}

std::string to_json(const WeakTypeReport& r) {
  return json{{"sigma", r.sigma},
              {"ratio", r.ratio},
              {"worst_alpha", r.worst_alpha},
              {"truncation", r.truncation},
              {"band", r.band},
              {"plateau", r.plateau}}
      .dump(2);
}

std::string to_json(const ProbeReport& r) {
  return json{{"radius", r.radius},
              {"sup", r.sup},
              {"argmax_t", r.argmax_t},
              {"slope", r.slope},
              {"expected_slope", r.expected_slope}}
      .dump(2);
}

std::string to_json(const EmpiricalResult& r) {
  return json{{"mean", r.mean}, {"std_error", r.std_error}, {"n", r.n}}
      .dump(2);
}

std::string to_json(const ErgodicReport& r) {
  return json{{"t", r.t},
              {"n", r.n},
              {"mean_norm", r.mean_norm},
              {"mean_envelope", r.mean_envelope},
              {"cov_defect", r.cov_defect},
              {"cov_envelope", r.cov_envelope},
              {"pass", r.pass}}
      .dump(2);
}

std::string to_json(const PathSample& p) {
  return json{{"times", p.times}, {"states", matrix_json(p.states)}}.dump(2);
}

std::string to_csv(const std::vector<GridRow>& rows) {
  std::string out = "s,x_norm,y_norm,angle,region,kernel,bound,ratio\n";
  for (const GridRow& r : rows) {
    out += format_real(r.s);
    out += ',';
    out += format_real(r.x_norm);
    out += ',';
    out += format_real(r.y_norm);
    out += ',';
    out += format_real(r.angle);
    out += ',';
    out += std::to_string(r.region);
    out += ',';
    out += format_real(r.kernel);
    out += ',';
    out += format_real(r.bound);
    out += ',';
    out += format_real(r.ratio);
    out += '\n';
  }
  return out;
}

}  // namespace ousg
