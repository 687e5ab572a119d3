#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "outctrl/lti_model.hpp"
#include "outctrl/synthesis.hpp"

namespace outctrl {

namespace {

using nlohmann::json;

json complex_to_json(const Complex& z) {
  if (z.imag() == 0.0) return json(z.real());
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw ParseError(where + ": entries must be numbers or [re, im] pairs");
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      row.push_back(complex_to_json(M(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw ParseError("field \"" + field +
                     "\" must be a non-empty array of non-empty rows");
  }
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      std::ostringstream os;
      os << "field \"" << field << "\": row " << i << " has "
         << (j[i].is_array() ? std::to_string(j[i].size()) : "no")
         << " entries, expected " << cols;
      throw ParseError(os.str());
    }
    for (size_t k = 0; k < cols; ++k) {
      std::ostringstream os;
      os << "field \"" << field << "\", entry (" << i << ", " << k << ")";
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_from_json(j[i][k], os.str());
    }
  }
  return M;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void write_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write '" + path.string() + "'");
  }
  out << j.dump(2) << '\n';
}

}  // namespace

json to_json(const LtiSystem& sys) {
  json j = json::object();
  if (!sys.name.empty()) j["name"] = sys.name;
  j["A"] = matrix_to_json(sys.A);
  j["B"] = matrix_to_json(sys.B);
  j["C"] = matrix_to_json(sys.C);
  return j;
}

LtiSystem system_from_json(const json& j) {
  if (!j.is_object()) {
    throw ParseError("system document must be a JSON object");
  }
  for (const char* field : {"A", "B", "C"}) {
    if (!j.contains(field)) {
      throw ParseError(std::string("missing field \"") + field + "\"");
    }
  }
  LtiSystem sys;
  sys.A = matrix_from_json(j.at("A"), "A");
  sys.B = matrix_from_json(j.at("B"), "B");
  sys.C = matrix_from_json(j.at("C"), "C");
  if (j.contains("name")) {
    if (!j.at("name").is_string()) {
      throw ParseError("field \"name\" must be a string");
    }
    sys.name = j.at("name").get<std::string>();
  }
  return sys;
}

LtiSystem load_system(const std::filesystem::path& path) {
  const json j = parse_file(path);
  try {
    LtiSystem sys = system_from_json(j);
    validate(sys);
    return sys;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    // Shape/finiteness defects in a file are schema errors to the caller.
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void save_system(const LtiSystem& sys, const std::filesystem::path& path) {
  write_file(to_json(sys), path);
}

json to_json(const ControlSignal& signal) {
  json j = json::object();
  j["T"] = signal.horizon;
  json nodes = json::array();
  for (Eigen::Index i = 0; i < signal.nodes.size(); ++i) {
    nodes.push_back(signal.nodes(i));
  }
  j["nodes"] = std::move(nodes);
  json samples = json::array();
  for (const Vector& u : signal.samples) {
    json row = json::array();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      row.push_back(complex_to_json(u(i)));
    }
    samples.push_back(std::move(row));
  }
  j["samples"] = std::move(samples);
  return j;
}

ControlSignal control_from_json(const json& j) {
  if (!j.is_object()) {
    throw ParseError("control document must be a JSON object");
  }
  for (const char* field : {"T", "nodes", "samples"}) {
    if (!j.contains(field)) {
      throw ParseError(std::string("missing field \"") + field + "\"");
    }
  }
  if (!j.at("T").is_number()) {
    throw ParseError("field \"T\" must be a number");
  }
  ControlSignal signal;
  signal.horizon = j.at("T").get<double>();

  const json& nodes = j.at("nodes");
  if (!nodes.is_array() || nodes.empty()) {
    throw ParseError("field \"nodes\" must be a non-empty array");
  }
  signal.nodes.resize(static_cast<Eigen::Index>(nodes.size()));
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_number()) {
      throw ParseError("field \"nodes\": entry " + std::to_string(i) +
                       " must be a number");
    }
    signal.nodes(static_cast<Eigen::Index>(i)) = nodes[i].get<double>();
  }

  const json& samples = j.at("samples");
  if (!samples.is_array() || samples.size() != nodes.size()) {
    throw ParseError(
        "field \"samples\" must be an array with one entry per node");
  }
  signal.samples.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const json& row = samples[i];
    if (!row.is_array() || row.empty()) {
      throw ParseError("field \"samples\": entry " + std::to_string(i) +
                       " must be a non-empty array");
    }
    if (i > 0 && row.size() != samples[0].size()) {
      throw ParseError("field \"samples\": entry " + std::to_string(i) +
                       " has inconsistent input dimension");
    }
    Vector u(static_cast<Eigen::Index>(row.size()));
    for (size_t k = 0; k < row.size(); ++k) {
      std::ostringstream os;
      os << "field \"samples\", entry (" << i << ", " << k << ")";
      u(static_cast<Eigen::Index>(k)) = complex_from_json(row[k], os.str());
    }
    signal.samples.push_back(std::move(u));
  }
  return signal;
}

ControlSignal load_control(const std::filesystem::path& path) {
  const json j = parse_file(path);
  try {
    return control_from_json(j);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void save_control(const ControlSignal& signal,
                  const std::filesystem::path& path) {
  write_file(to_json(signal), path);
}

}  // namespace outctrl
