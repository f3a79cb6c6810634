#include <chrono>
#include <ctime>
#include <fstream>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "atlas/error.hpp"
#include "atlas/ingest.hpp"

namespace atlas {

namespace fs = std::filesystem;

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path + query
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/?#]+)([^#]*)$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ParameterError("unsupported URL: " + url);
  ParsedUrl out{m[1].str(), m[2].str()};
  if (out.target.empty()) out.target = "/";
  return out;
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& dest, const FetchManifest& m) {
  nlohmann::ordered_json j;
  j["url"] = m.url;
  j["sha256"] = m.sha256;
  j["bytes"] = m.bytes;
  j["fetched_at"] = m.fetched_at;
  std::ofstream out(manifest_path_for(dest), std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest for " + dest.string());
  out << j.dump(2) << '\n';
}

enum class AttemptOutcome { Complete, Interrupted };

// One GET, appending to the partial file. Throws FetchError on an HTTP
// error status; returns Interrupted on a transport failure.
AttemptOutcome attempt_download(httplib::Client& client, const std::string& target,
                                const fs::path& part, int& last_status) {
  std::uint64_t offset = fs::exists(part) ? fs::file_size(part) : 0;
  httplib::Headers headers;
  if (offset > 0) headers.emplace("Range", "bytes=" + std::to_string(offset) + "-");

  std::ofstream out;
  int status = 0;
  auto result = client.Get(
      target, headers,
      [&](const httplib::Response& res) {
        status = res.status;
        if (status == 416 || status >= 400) return false;
        // 200 to a ranged request means the server ignored Range.
        const bool resume = offset > 0 && status == 206;
        out.open(part, std::ios::binary | (resume ? std::ios::app : std::ios::trunc));
        if (!resume) offset = 0;
        return static_cast<bool>(out);
      },
      [&](const char* data, std::size_t len) {
        out.write(data, static_cast<std::streamsize>(len));
        return static_cast<bool>(out);
      });
  out.close();
  last_status = status;

  if (status == 416) {
    // Partial file no longer matches the remote object; start over.
    fs::remove(part);
    return AttemptOutcome::Interrupted;
  }
  if (status >= 400) {
    throw FetchError("GET " + target + " failed with HTTP " + std::to_string(status),
                     status);
  }
  if (!result) return AttemptOutcome::Interrupted;
  return AttemptOutcome::Complete;
}

}  // namespace

fs::path manifest_path_for(const fs::path& dest) {
  return fs::path(dest.string() + ".manifest.json");
}

fs::path partial_path_for(const fs::path& dest) {
  return fs::path(dest.string() + ".part");
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::optional<FetchManifest> read_manifest(const fs::path& dest) {
  std::ifstream in(manifest_path_for(dest));
  if (!in) return std::nullopt;
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw IntegrityError("unreadable manifest for " + dest.string());
  }
  return FetchManifest{j.value("url", ""), j.value("sha256", ""),
                       j.value("bytes", std::uint64_t{0}), j.value("fetched_at", "")};
}

fs::path fetch_dataset(const std::string& url, const fs::path& dest,
                       const FetchOptions& options) {
  const auto parsed = parse_url(url);
  httplib::Client client(parsed.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(options.connect_timeout_s);
  client.set_read_timeout(options.read_timeout_s);

  const auto part = partial_path_for(dest);
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());

  int status = 0;
  bool complete = false;
  for (int attempt = 0; attempt < std::max(1, options.attempts) && !complete; ++attempt) {
    complete = attempt_download(client, parsed.target, part, status) ==
               AttemptOutcome::Complete;
  }
  if (!complete) {
    throw FetchError("transfer of " + url + " interrupted; partial data kept in " +
                         part.string(),
                     status);
  }

  const auto digest = sha256_file(part);
  if (const auto previous = read_manifest(dest);
      previous && !previous->sha256.empty() && previous->sha256 != digest) {
    fs::remove(part);
    throw IntegrityError("checksum mismatch for " + url + ": manifest has " +
                         previous->sha256 + ", download has " + digest);
  }
  const auto bytes = fs::file_size(part);
  fs::rename(part, dest);
  write_manifest(dest, {url, digest, bytes, utc_now_iso8601()});
  return dest;
}

}  // namespace atlas
