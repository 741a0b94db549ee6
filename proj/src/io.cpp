#include "seasonal_dispersal/io.hpp"

#include "seasonal_dispersal/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef SDISP_VERSION
#define SDISP_VERSION "0.0.0"
#endif

namespace sdisp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string artifact_version() { return SDISP_VERSION; }

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += quote_if_needed(table.header[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw InvalidArgument("to_csv: row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              out += format_real(v);
            else if constexpr (std::is_same_v<T, long long>)
              out += std::to_string(v);
            else
              out += quote_if_needed(v);
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(md[i]);
  return out.str();
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return sha256_hex(bytes.str());
}

std::string write_text(const std::string& text, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw InvalidArgument("write to '" + path.string() + "' failed");
  return sha256_hex(text);
}

std::string write_csv(const CsvTable& table, const fs::path& path) {
  return write_text(to_csv(table), path);
}

RunManifest::RunManifest(std::string command, json config)
    : command_(std::move(command)),
      config_(std::move(config)),
      started_(utc_now()),
      last_(std::chrono::steady_clock::now()) {}

void RunManifest::mark_stage(const std::string& name) {
  const auto now = std::chrono::steady_clock::now();
  stages_.push_back({{"stage", name},
                     {"seconds", std::chrono::duration<double>(now - last_).count()}});
  last_ = now;
}

void RunManifest::add_file(const fs::path& path, const std::string& digest) {
  files_.push_back({{"path", path.string()}, {"sha256", digest}});
}

json RunManifest::to_json() const {
  return {{"artifact", "seasonal_dispersal"},
          {"version", artifact_version()},
          {"command", command_},
          {"started_utc", started_},
          {"finished_utc", finished_},
          {"stages", stages_},
          {"files", files_},
          {"summary", summary_},
          {"config", config_}};
}

void RunManifest::write(const fs::path& path) {
  finished_ = utc_now();
  write_text(to_json().dump(2) + "\n", path);
}

ManifestCheck verify_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw InvalidArgument("cannot read manifest '" + manifest_path.string() + "'");
  const json doc = json::parse(in);
  ManifestCheck check;
  const fs::path base = manifest_path.parent_path();
  for (const auto& f : doc.at("files")) {
    fs::path p = f.at("path").get<std::string>();
    if (p.is_relative() && !fs::exists(p)) p = base / p;
    std::string actual;
    try {
      actual = file_sha256(p);
    } catch (const Error&) {
      actual = "<missing>";
    }
    if (actual != f.at("sha256").get<std::string>()) {
      check.ok = false;
      check.mismatches.push_back(p.string());
    }
  }
  return check;
}

}  // namespace sdisp
