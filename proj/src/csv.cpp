#include "prefshare/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace prefshare::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

void check_id(const std::string& id, const std::filesystem::path& path) {
  if (id.empty())
    throw ValidationError(path.string() + ": empty identifier");
  if (id.find_first_of(",\"\n\r") != std::string::npos)
    throw ValidationError(path.string() + ": identifier contains a forbidden character: '" + id + "'");
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError(path.string() + ": bad numeric field '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::filesystem::path& path) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError(path.string() + ": bad integer field '" + s + "'");
  return v;
}

}  // namespace

Table read_table(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  Table table;
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError(path.string() + ": missing header row");
  table.header = split_line(line);
  if (table.header != expected_header)
    throw ValidationError(path.string() + ": expected header '" + join(expected_header) +
                          "', got '" + join(table.header) + "'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != expected_header.size())
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(expected_header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void write_table_atomic(const std::filesystem::path& path,
                        const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << join(header) << '\n';
    for (const auto& row : rows) out << join(row) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

LikesMatrix load_likes(const std::filesystem::path& path) {
  auto table = read_table(path, {"user_id", "item_id"});
  LikesMatrix likes;
  for (const auto& row : table.rows) {
    check_id(row[0], path);
    check_id(row[1], path);
    likes.add(row[0], row[1]);
  }
  return likes;
}

void save_likes(const std::filesystem::path& path, const LikesMatrix& likes) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [user, items] : likes.by_user())
    for (const auto& item : items) rows.push_back({user, item});
  write_table_atomic(path, {"user_id", "item_id"}, rows);
}

RatingsTable load_ratings(const std::filesystem::path& path) {
  auto table = read_table(path, {"user_id", "item_id", "rating"});
  RatingsTable ratings;
  for (const auto& row : table.rows) {
    check_id(row[0], path);
    check_id(row[1], path);
    ratings.add(row[0], row[1], Rating::parse(row[2]));
  }
  return ratings;
}

void save_ratings(const std::filesystem::path& path, const RatingsTable& ratings) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, rating] : ratings.entries())
    rows.push_back({key.first, key.second, rating.to_string()});
  write_table_atomic(path, {"user_id", "item_id", "rating"}, rows);
}

std::vector<ShareRecord> load_shares(const std::filesystem::path& path) {
  auto table = read_table(path, {"sender_id", "recipient_id", "item_id", "shared"});
  std::vector<ShareRecord> shares;
  for (const auto& row : table.rows) {
    check_id(row[0], path);
    check_id(row[1], path);
    check_id(row[2], path);
    if (row[0] == row[1])
      throw ValidationError(path.string() + ": share with sender == recipient: " + row[0]);
    if (row[3] != "0" && row[3] != "1")
      throw ValidationError(path.string() + ": shared flag must be 0 or 1, got '" + row[3] + "'");
    shares.push_back({row[0], row[1], row[2], row[3] == "1"});
  }
  return shares;
}

void save_shares(const std::filesystem::path& path, const std::vector<ShareRecord>& shares) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : shares)
    rows.push_back({s.sender, s.recipient, s.item, s.shared ? "1" : "0"});
  write_table_atomic(path, {"sender_id", "recipient_id", "item_id", "shared"}, rows);
}

std::map<ItemId, ItemMeta> load_items(const std::filesystem::path& path) {
  auto table = read_table(path, {"item_id", "ext_rating", "ext_popularity"});
  std::map<ItemId, ItemMeta> items;
  for (const auto& row : table.rows) {
    check_id(row[0], path);
    ItemMeta meta{row[0], parse_double(row[1], path), parse_int(row[2], path)};
    meta.validate();
    if (!items.emplace(meta.item, meta).second)
      throw ValidationError(path.string() + ": duplicate item " + meta.item);
  }
  return items;
}

void save_items(const std::filesystem::path& path, const std::map<ItemId, ItemMeta>& items) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [id, meta] : items)
    rows.push_back({id, format_double(meta.ext_rating), std::to_string(meta.ext_popularity)});
  write_table_atomic(path, {"item_id", "ext_rating", "ext_popularity"}, rows);
}

std::vector<DyadSession> load_sessions(const std::filesystem::path& path) {
  auto table = read_table(path, {"user_a", "user_b", "item_id", "provenance"});
  std::vector<DyadSession> sessions;
  DyadSession* cur = nullptr;
  for (const auto& row : table.rows) {
    check_id(row[0], path);
    check_id(row[1], path);
    check_id(row[2], path);
    if (!cur || cur->user_a != row[0] || cur->user_b != row[1]) {
      sessions.emplace_back();
      cur = &sessions.back();
      cur->user_a = row[0];
      cur->user_b = row[1];
    }
    cur->shown_items.push_back(row[2]);
    const std::string& prov = row[3];
    if (prov != "own_a" && prov != "own_b" && prov != "both")
      throw ValidationError(path.string() + ": provenance must be own_a|own_b|both, got '" + prov + "'");
    if (prov == "own_a" || prov == "both") cur->own_recs_a.push_back(row[2]);
    if (prov == "own_b" || prov == "both") cur->own_recs_b.push_back(row[2]);
  }
  for (auto& s : sessions) {
    std::sort(s.own_recs_a.begin(), s.own_recs_a.end());
    std::sort(s.own_recs_b.begin(), s.own_recs_b.end());
    s.validate();
  }
  return sessions;
}

void save_sessions(const std::filesystem::path& path, const std::vector<DyadSession>& sessions) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : sessions) {
    for (const auto& item : s.shown_items) {
      bool in_a = std::binary_search(s.own_recs_a.begin(), s.own_recs_a.end(), item);
      bool in_b = std::binary_search(s.own_recs_b.begin(), s.own_recs_b.end(), item);
      const char* prov = in_a && in_b ? "both" : in_a ? "own_a" : "own_b";
      rows.push_back({s.user_a, s.user_b, item, prov});
    }
  }
  write_table_atomic(path, {"user_a", "user_b", "item_id", "provenance"}, rows);
}

}  // namespace prefshare::csv
