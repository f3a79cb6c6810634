#include "atlas/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "atlas/error.hpp"

namespace atlas {

namespace {

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t'; });
}

std::uint64_t parse_count(std::string_view text, std::size_t line_no,
                          const std::string& source) {
  std::uint64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(source, line_no,
                     "post count must be a non-negative integer, got '" +
                         std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::optional<ActivityFormat> parse_activity_format(std::string_view name) {
  if (name == "tsv") return ActivityFormat::Tsv;
  if (name == "jsonl" || name == "jsonlines") return ActivityFormat::JsonLines;
  return std::nullopt;
}

ActivityRecord parse_tsv_row(std::string_view line, std::size_t line_no,
                             const std::string& source) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 3) {
    throw ParseError(source, line_no,
                     "expected 3 tab-separated fields, got " +
                         std::to_string(fields.size()));
  }
  if (fields[0].empty() || fields[1].empty()) {
    throw ParseError(source, line_no, "empty actor or forum id");
  }
  return {std::string(fields[0]), std::string(fields[1]),
          parse_count(fields[2], line_no, source)};
}

ActivityRecord parse_jsonl_row(std::string_view line, std::size_t line_no,
                               const std::string& source) {
  nlohmann::json row;
  try {
    row = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, line_no, e.what());
  }
  if (!row.is_object()) throw ParseError(source, line_no, "expected an object");
  for (const char* key : {"actor", "forum", "count"}) {
    if (!row.contains(key)) {
      throw ParseError(source, line_no, std::string("missing key '") + key + "'");
    }
  }
  const auto& actor = row["actor"];
  const auto& forum = row["forum"];
  const auto& count = row["count"];
  if (!actor.is_string() || !forum.is_string()) {
    throw ParseError(source, line_no, "actor and forum must be strings");
  }
  if (!count.is_number_unsigned()) {
    throw ParseError(source, line_no,
                     "count must be a non-negative integer, got " + count.dump());
  }
  ActivityRecord rec{actor.get<std::string>(), forum.get<std::string>(),
                     count.get<std::uint64_t>()};
  if (rec.actor.empty() || rec.forum.empty()) {
    throw ParseError(source, line_no, "empty actor or forum id");
  }
  return rec;
}

std::vector<ActivityRecord> parse_activity(std::istream& in,
                                           const RowParser& parser,
                                           const std::string& source) {
  std::vector<ActivityRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim_cr(line);
    if (is_blank(view)) continue;
    records.push_back(parser(view, line_no, source));
  }
  if (in.bad()) throw IoError("read failure in " + source);
  return records;
}

std::vector<ActivityRecord> load_activity(const std::filesystem::path& path,
                                          ActivityFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const RowParser parser =
      format == ActivityFormat::Tsv ? RowParser(parse_tsv_row) : RowParser(parse_jsonl_row);
  return parse_activity(in, parser, path.string());
}

void write_activity_tsv(std::ostream& out,
                        std::span<const ActivityRecord> records) {
  for (const auto& r : records) {
    out << r.actor << '\t' << r.forum << '\t' << r.post_count << '\n';
  }
}

std::span<const std::uint32_t> BipartiteGraph::forums_of(std::size_t actor) const {
  return std::span(actor_forums_)
      .subspan(actor_offsets_[actor], actor_offsets_[actor + 1] - actor_offsets_[actor]);
}

std::span<const std::uint32_t> BipartiteGraph::actors_of(std::size_t forum) const {
  return std::span(forum_actors_)
      .subspan(forum_offsets_[forum], forum_offsets_[forum + 1] - forum_offsets_[forum]);
}

bool BipartiteGraph::is_member(std::string_view actor, std::string_view forum) const {
  const auto a = std::lower_bound(actors_.begin(), actors_.end(), actor);
  const auto f = std::lower_bound(forums_.begin(), forums_.end(), forum);
  if (a == actors_.end() || *a != actor || f == forums_.end() || *f != forum) {
    return false;
  }
  const auto fs = forums_of(static_cast<std::size_t>(a - actors_.begin()));
  return std::binary_search(fs.begin(), fs.end(),
                            static_cast<std::uint32_t>(f - forums_.begin()));
}

BipartiteGraph build_bipartite(std::span<const ActivityRecord> records,
                               const IngestConfig& cfg) {
  if (cfg.min_posts < 1) throw ParameterError("min_posts must be >= 1");

  // Sum duplicates, then threshold. std::map gives a record-order
  // independent, lexicographic layout.
  std::map<std::pair<std::string_view, std::string_view>, std::uint64_t> totals;
  for (const auto& r : records) {
    totals[{r.actor, r.forum}] += r.post_count;
  }

  std::map<std::string_view, std::vector<std::string_view>> forum_members;
  for (const auto& [key, count] : totals) {
    if (count >= cfg.min_posts) forum_members[key.second].push_back(key.first);
  }

  BipartiteGraph bg;
  std::vector<std::pair<std::string_view, std::string_view>> kept;  // (actor, forum)
  for (const auto& [forum, members] : forum_members) {
    if (members.size() < cfg.min_forum_actors) continue;
    bg.forums_.emplace_back(forum);
    for (auto actor : members) kept.emplace_back(actor, forum);
  }
  std::sort(kept.begin(), kept.end());

  for (const auto& [actor, forum] : kept) {
    if (bg.actors_.empty() || bg.actors_.back() != actor) bg.actors_.emplace_back(actor);
  }

  auto forum_index = [&](std::string_view f) {
    return static_cast<std::uint32_t>(
        std::lower_bound(bg.forums_.begin(), bg.forums_.end(), f) - bg.forums_.begin());
  };

  bg.actor_forums_.reserve(kept.size());
  std::vector<std::size_t> forum_sizes(bg.forums_.size(), 0);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0 && kept[i].first != kept[i - 1].first) {
      bg.actor_offsets_.push_back(bg.actor_forums_.size());
    }
    const auto f = forum_index(kept[i].second);
    bg.actor_forums_.push_back(f);
    ++forum_sizes[f];
  }
  if (!kept.empty()) bg.actor_offsets_.push_back(bg.actor_forums_.size());

  for (auto size : forum_sizes) bg.forum_offsets_.push_back(bg.forum_offsets_.back() + size);
  bg.forum_actors_.resize(bg.actor_forums_.size());
  std::vector<std::size_t> cursor(bg.forum_offsets_.begin(), bg.forum_offsets_.end() - 1);
  for (std::size_t a = 0; a < bg.actors_.size(); ++a) {
    for (auto f : bg.forums_of(a)) {
      bg.forum_actors_[cursor[f]++] = static_cast<std::uint32_t>(a);
    }
  }
  return bg;
}

BipartiteSummary summarize(const BipartiteGraph& bg) {
  BipartiteSummary s;
  s.actors = bg.actor_count();
  s.forums = bg.forum_count();
  s.memberships = bg.membership_count();
  if (s.actors == 0) return s;

  s.min_forums_per_actor = s.min_actors_per_forum = static_cast<std::size_t>(-1);
  for (std::size_t a = 0; a < s.actors; ++a) {
    const auto d = bg.forums_of(a).size();
    s.min_forums_per_actor = std::min(s.min_forums_per_actor, d);
    s.max_forums_per_actor = std::max(s.max_forums_per_actor, d);
  }
  for (std::size_t f = 0; f < s.forums; ++f) {
    const auto d = bg.actors_of(f).size();
    s.min_actors_per_forum = std::min(s.min_actors_per_forum, d);
    s.max_actors_per_forum = std::max(s.max_actors_per_forum, d);
  }
  s.mean_forums_per_actor = static_cast<double>(s.memberships) / static_cast<double>(s.actors);
  s.mean_actors_per_forum = static_cast<double>(s.memberships) / static_cast<double>(s.forums);
  return s;
}

}  // namespace atlas
