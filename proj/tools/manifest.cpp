#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include <openssl/evp.h>
#include <unistd.h>

#include "parmine/error.hpp"
#include "parmine/version.hpp"

namespace parmine::cli {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open input");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& fill) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw InputError(path, 0, "cannot open output for writing");
      fill(out);
      out.flush();
      if (!out) throw InputError(path, 0, "write failed");
    }
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

Manifest::Manifest(std::string command) : command_(std::move(command)), started_at_(utc_now()) {}

void Manifest::set_config(const std::string& key, std::string value) { config_[key] = std::move(value); }

void Manifest::add_input(const std::string& role, const std::string& path) {
  inputs_.push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
}

void Manifest::add_output(const std::string& role, const std::string& path) {
  outputs_.push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
}

void Manifest::set_count(const std::string& key, std::uint64_t value) { counts_[key] = value; }

void Manifest::set_seconds(const std::string& stage, double seconds) { seconds_[stage] = seconds; }

nlohmann::json Manifest::to_json(bool runtime) const {
  nlohmann::json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["tool"] = "parmine";
  j["version"] = kVersion;
  j["command"] = command_;
  j["config"] = config_;
  j["seed"] = seed_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  j["counts"] = counts_;
  if (!result_.is_null()) j["result"] = result_;
  if (runtime) {
    j["runtime"] = {{"started_at", started_at_}, {"finished_at", utc_now()}, {"jobs", jobs_},
                    {"seconds", seconds_}};
  }
  return j;
}

void Manifest::write(const std::string& path, bool runtime) const {
  const auto text = to_json(runtime).dump(2) + "\n";
  write_atomic(path, [&](std::ostream& out) { out << text; });
}

}  // namespace parmine::cli
