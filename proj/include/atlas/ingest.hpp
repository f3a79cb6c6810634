#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atlas {

struct ActivityRecord {
  std::string actor;
  std::string forum;
  std::uint64_t post_count = 0;

  friend bool operator==(const ActivityRecord&, const ActivityRecord&) = default;
};

enum class ActivityFormat { Tsv, JsonLines };

std::optional<ActivityFormat> parse_activity_format(std::string_view name);

// Converter hook: turns one non-blank input line into a record, or throws
// ParseError. The line number is 1-based.
using RowParser =
    std::function<ActivityRecord(std::string_view line, std::size_t line_no,
                                 const std::string& source)>;

ActivityRecord parse_tsv_row(std::string_view line, std::size_t line_no,
                             const std::string& source);
ActivityRecord parse_jsonl_row(std::string_view line, std::size_t line_no,
                               const std::string& source);

// Blank lines are skipped; every other line must parse.
std::vector<ActivityRecord> parse_activity(std::istream& in,
                                           const RowParser& parser,
                                           const std::string& source);

std::vector<ActivityRecord> load_activity(const std::filesystem::path& path,
                                          ActivityFormat format);

void write_activity_tsv(std::ostream& out,
                        std::span<const ActivityRecord> records);

struct IngestConfig {
  std::uint64_t min_posts = 10;
  std::uint64_t min_forum_actors = 1;
};

// Actor x forum incidence. Actors and forums are stored in lexicographic
// order; memberships are kept in CSR form on both sides.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  std::size_t actor_count() const { return actors_.size(); }
  std::size_t forum_count() const { return forums_.size(); }
  std::size_t membership_count() const { return actor_forums_.size(); }
  bool empty() const { return actor_forums_.empty(); }

  const std::vector<std::string>& actors() const { return actors_; }
  const std::vector<std::string>& forums() const { return forums_; }

  // Sorted forum indices the actor is active in.
  std::span<const std::uint32_t> forums_of(std::size_t actor) const;
  // Sorted actor indices active in the forum.
  std::span<const std::uint32_t> actors_of(std::size_t forum) const;

  bool is_member(std::string_view actor, std::string_view forum) const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  friend BipartiteGraph build_bipartite(std::span<const ActivityRecord>,
                                        const IngestConfig&);

  std::vector<std::string> actors_;
  std::vector<std::string> forums_;
  std::vector<std::size_t> actor_offsets_{0};
  std::vector<std::uint32_t> actor_forums_;
  std::vector<std::size_t> forum_offsets_{0};
  std::vector<std::uint32_t> forum_actors_;
};

// Repeated (actor, forum) rows are summed before thresholding.
BipartiteGraph build_bipartite(std::span<const ActivityRecord> records,
                               const IngestConfig& cfg);

struct BipartiteSummary {
  std::size_t actors = 0;
  std::size_t forums = 0;
  std::size_t memberships = 0;
  double mean_forums_per_actor = 0.0;
  std::size_t min_forums_per_actor = 0;
  std::size_t max_forums_per_actor = 0;
  double mean_actors_per_forum = 0.0;
  std::size_t min_actors_per_forum = 0;
  std::size_t max_actors_per_forum = 0;
};

BipartiteSummary summarize(const BipartiteGraph& bg);

struct FetchOptions {
  int attempts = 3;
  int connect_timeout_s = 10;
  int read_timeout_s = 60;
};

struct FetchManifest {
  std::string url;
  std::string sha256;
  std::uint64_t bytes = 0;
  std::string fetched_at;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& dest);
std::filesystem::path partial_path_for(const std::filesystem::path& dest);

// Downloads url into dest. A leftover "<dest>.part" from an interrupted
// transfer is resumed with a Range request. On success the sidecar
// "<dest>.manifest.json" records the checksum; if a manifest already exists
// and the new payload hashes differently, IntegrityError is thrown and dest
// is left untouched.
std::filesystem::path fetch_dataset(const std::string& url,
                                    const std::filesystem::path& dest,
                                    const FetchOptions& options = {});

std::optional<FetchManifest> read_manifest(const std::filesystem::path& dest);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace atlas
