#include "chanres/channel_io.hpp"

#include <fstream>
#include <sstream>

#include "chanres/error.hpp"

namespace chanres {

using nlohmann::json;

namespace {

int read_dim(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw Error(ErrorCode::ParseError, std::string("missing integer field '") + key + "'");
  }
  const int d = j[key].get<int>();
  if (d < 1) throw Error(ErrorCode::ParseError, std::string("field '") + key + "' must be positive");
  return d;
}

void expect_shape(const CMatrix& m, int rows, int cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::ParseError, std::string(what) + " has shape " + std::to_string(m.rows()) + "x" +
                                           std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                                           "x" + std::to_string(cols));
  }
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw Error(ErrorCode::ParseError, "matrix must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::ParseError, "ragged matrix row " + std::to_string(r));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw Error(ErrorCode::ParseError, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                               ") is not an [re, im] pair");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json channel_to_json(const ChannelSpec& channel, bool forceChoi) {
  json j;
  j["dim_in"] = channel.dim_in();
  j["dim_out"] = channel.dim_out();
  if (channel.kraus() && !forceChoi) {
    j["repr"] = "kraus";
    json ops = json::array();
    for (const auto& k : *channel.kraus()) ops.push_back(matrix_to_json(k));
    j["data"] = std::move(ops);
  } else {
    j["repr"] = "choi";
    j["data"] = matrix_to_json(channel.choi().matrix());
  }
  return j;
}

ChannelSpec channel_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "channel document must be an object");
  const int dIn = read_dim(j, "dim_in");
  const int dOut = read_dim(j, "dim_out");
  if (!j.contains("repr") || !j["repr"].is_string()) throw Error(ErrorCode::ParseError, "missing 'repr'");
  if (!j.contains("data")) throw Error(ErrorCode::ParseError, "missing 'data'");
  const std::string repr = j["repr"].get<std::string>();
  const json& data = j["data"];
  if (repr == "choi") {
    CMatrix m = matrix_from_json(data);
    expect_shape(m, dIn * dOut, dIn * dOut, "choi data");
    return ChannelSpec::from_choi(ChoiMatrix(dIn, dOut, std::move(m)));
  }
  if (repr == "kraus") {
    if (!data.is_array() || data.empty()) throw Error(ErrorCode::ParseError, "kraus data must be a non-empty list");
    std::vector<CMatrix> ops;
    for (const auto& k : data) {
      CMatrix m = matrix_from_json(k);
      expect_shape(m, dOut, dIn, "kraus operator");
      ops.push_back(std::move(m));
    }
    return ChannelSpec::from_kraus(std::move(ops), dIn, dOut);
  }
  throw Error(ErrorCode::ParseError, "unknown repr '" + repr + "'");
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << j.dump(1) << '\n';
}

ChannelSpec read_channel(const std::filesystem::path& path) {
  try {
    return channel_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_channel(const std::filesystem::path& path, const ChannelSpec& channel, bool forceChoi) {
  write_json(path, channel_to_json(channel, forceChoi));
}

}  // namespace chanres
