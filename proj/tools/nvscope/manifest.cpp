#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <openssl/evp.h>

#include "nvscope/errors.hpp"

namespace nvscope::app {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned k = 0; k < len; ++k) {
    out += kHex[digest[k] >> 4];
    out += kHex[digest[k] & 0xF];
  }
  return out;
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path &path, std::string_view bytes) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out)
      throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json RunManifest::to_json() const {
  json outs = json::array();
  for (const auto &o : outputs)
    outs.push_back({{"file", o.file}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  return {{"tool", tool},
          {"version", version},
          {"command", command},
          {"config_path", config_path},
          {"config_sha256", config_sha256},
          {"started_utc", started_utc},
          {"finished_utc", finished_utc},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"outputs", outs},
          {"details", details}};
}

RunManifest RunManifest::from_json(const json &j) {
  RunManifest m;
  m.tool = j.at("tool").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.config_path = j.value("config_path", "");
  m.config_sha256 = j.value("config_sha256", "");
  m.started_utc = j.value("started_utc", "");
  m.finished_utc = j.value("finished_utc", "");
  if (j.contains("seed") && !j.at("seed").is_null())
    m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto &o : j.at("outputs"))
    m.outputs.push_back({o.at("file").get<std::string>(), o.at("sha256").get<std::string>(),
                         o.at("bytes").get<std::size_t>()});
  m.details = j.value("details", json::object());
  return m;
}

OutputWriter::OutputWriter(fs::path dir) : dir_(std::move(dir)) {}

void OutputWriter::write(const std::string &name, std::string_view bytes) {
  write_atomic(dir_ / name, bytes);
  records_.push_back({name, sha256_hex(bytes), bytes.size()});
}

fs::path manifest_path(const fs::path &dir, std::string_view command) {
  return dir / (std::string(command) + ".manifest.json");
}

VerifyReport verify_manifest(const fs::path &manifest) {
  VerifyReport r;
  RunManifest m;
  try {
    m = RunManifest::from_json(json::parse(read_file(manifest)));
  } catch (const std::exception &e) {
    r.ok = false;
    r.problems.push_back(manifest.string() + ": unreadable manifest (" + e.what() + ")");
    return r;
  }
  const fs::path dir = manifest.parent_path();
  for (const auto &o : m.outputs) {
    std::string bytes;
    try {
      bytes = read_file(dir / o.file);
    } catch (const Error &) {
      r.ok = false;
      r.problems.push_back(o.file + ": missing");
      continue;
    }
    if (bytes.size() != o.bytes || sha256_hex(bytes) != o.sha256) {
      r.ok = false;
      r.problems.push_back(o.file + ": checksum mismatch");
    }
  }
  return r;
}

} // namespace nvscope::app
