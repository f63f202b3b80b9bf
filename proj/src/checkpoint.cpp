#include "radvp/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "radvp/config.hpp"
#include "radvp/errors.hpp"
#include "radvp/format.hpp"

namespace radvp {

namespace {

constexpr const char* kMagic = "RADVP-CHECKPOINT";
static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::vector<std::string> columns(bool tangents) {
  std::vector<std::string> c{"theta", "a", "ell", "w", "g", "group"};
  if (tangents) {
    c.push_back("d_theta_da");
    c.push_back("d_a_da");
  }
  return c;
}

std::vector<double> row(const Ensemble& ens, const TangentState* tan, std::size_t i) {
  const Marker& mk = ens.markers[i];
  std::vector<double> r{mk.theta, mk.a, mk.ell, mk.w, mk.g, static_cast<double>(mk.group)};
  if (tan) {
    r.push_back(tan->d_theta_da[i]);
    r.push_back(tan->d_a_da[i]);
  }
  return r;
}

nlohmann::json header(const Ensemble& ens, bool tangents) {
  return {{"schema_version", kSchemaVersion},
          {"t", fmt_double(ens.t)},
          {"m", fmt_double(ens.consts.m)},
          {"lambda", fmt_double(ens.consts.lambda)},
          {"eps", fmt_double(ens.eps)},
          {"delta", fmt_double(ens.delta)},
          {"n", ens.markers.size()},
          {"columns", columns(tangents)}};
}

Checkpoint from_header(const nlohmann::json& h, const std::string& path, std::size_t& n, bool& tangents) {
  Checkpoint c;
  try {
    c.schema_version = h.at("schema_version").get<int>();
    if (c.schema_version != kSchemaVersion)
      throw ConfigError(path + ": unsupported checkpoint schema_version " + std::to_string(c.schema_version));
    c.ensemble.t = parse_double(h.at("t").get<std::string>());
    c.ensemble.consts.m = parse_double(h.at("m").get<std::string>());
    c.ensemble.consts.lambda = parse_double(h.at("lambda").get<std::string>());
    c.ensemble.eps = parse_double(h.at("eps").get<std::string>());
    c.ensemble.delta = parse_double(h.at("delta").get<std::string>());
    n = h.at("n").get<std::size_t>();
    const auto cols = h.at("columns").get<std::vector<std::string>>();
    if (cols == columns(true))
      tangents = true;
    else if (cols == columns(false))
      tangents = false;
    else
      throw ConfigError(path + ": unexpected checkpoint columns");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": bad checkpoint header: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": bad number in checkpoint header");
  }
  return c;
}

void push_row(Checkpoint& c, const std::vector<double>& r, bool tangents, const std::string& path) {
  const double grp = r[5];
  if (!(grp >= 0.0 && grp <= 4294967295.0 && grp == static_cast<double>(static_cast<std::uint32_t>(grp))))
    throw ConfigError(path + ": group column is not a 32-bit index");
  c.ensemble.markers.push_back({r[0], r[1], r[2], r[3], r[4], static_cast<std::uint32_t>(grp)});
  if (tangents) {
    c.tangents->d_theta_da.push_back(r[6]);
    c.tangents->d_a_da.push_back(r[7]);
  }
}

}  // namespace

CheckpointFormat parse_checkpoint_format(const std::string& name) {
  if (name == "binary") return CheckpointFormat::binary;
  if (name == "csv") return CheckpointFormat::csv;
  throw ConfigError("unknown checkpoint format '" + name + "'");
}

std::string checkpoint_file_name(std::size_t index, CheckpointFormat fmt) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ckpt_%06zu.%s", index, fmt == CheckpointFormat::binary ? "bin" : "csv");
  return buf;
}

void write_checkpoint(const std::string& path, const Ensemble& ens, const TangentState* tan, CheckpointFormat fmt) {
  if (tan && (tan->d_theta_da.size() != ens.markers.size() || tan->d_a_da.size() != ens.markers.size()))
    throw DomainError("tangent state does not match the ensemble");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path);
  const nlohmann::json h = header(ens, tan != nullptr);
  if (fmt == CheckpointFormat::binary) {
    out << kMagic << '\n' << h.dump() << '\n';
    for (std::size_t i = 0; i < ens.markers.size(); ++i) {
      const std::vector<double> r = row(ens, tan, i);
      out.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(r.size() * sizeof(double)));
    }
  } else {
    out << "# " << kMagic << '\n' << "# " << h.dump() << '\n';
    const auto cols = columns(tan != nullptr);
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j];
    out << '\n';
    for (std::size_t i = 0; i < ens.markers.size(); ++i) {
      const std::vector<double> r = row(ens, tan, i);
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << fmt_double(r[j]);
      out << '\n';
    }
  }
  if (!out) throw ConfigError("failed writing checkpoint " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  const bool csv = first.rfind("# ", 0) == 0;
  if (first != kMagic && first != std::string("# ") + kMagic) throw ConfigError(path + " is not a checkpoint");
  if (csv) {
    if (second.rfind("# ", 0) != 0) throw ConfigError(path + ": missing CSV header");
    second = second.substr(2);
  }
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(second);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + ": checkpoint header is not JSON");
  }
  std::size_t n = 0;
  bool tangents = false;
  Checkpoint c = from_header(h, path, n, tangents);
  if (tangents) c.tangents.emplace();
  const std::size_t ncol = columns(tangents).size();
  c.ensemble.markers.reserve(n);
  std::vector<double> r(ncol);
  if (!csv) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!in.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(ncol * sizeof(double))))
        throw ConfigError(path + ": truncated checkpoint");
      push_row(c, r, tangents, path);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ConfigError(path + ": trailing bytes after checkpoint data");
  } else {
    std::string line;
    std::getline(in, line);  // column names, already implied by the header
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw ConfigError(path + ": truncated checkpoint");
      std::stringstream ss(line);
      std::string cell;
      for (std::size_t j = 0; j < ncol; ++j) {
        if (!std::getline(ss, cell, ',')) throw ConfigError(path + ": short row " + std::to_string(i));
        try {
          r[j] = parse_double(cell);
        } catch (const std::invalid_argument&) {
          throw ConfigError(path + ": bad number in row " + std::to_string(i));
        }
      }
      push_row(c, r, tangents, path);
    }
  }
  return c;
}

}  // namespace radvp
