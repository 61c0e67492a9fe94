#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "prefshare/core.hpp"

namespace prefshare::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Comma-separated, UTF-8, header row required. Ids may not contain commas,
// quotes, or line breaks, so no quoting layer is needed.
Table read_table(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header);

// Writes to <path>.tmp then renames, so readers never see partial files.
void write_table_atomic(const std::filesystem::path& path,
                        const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);  // shortest round-trip representation

// Schema: user_id,item_id
LikesMatrix load_likes(const std::filesystem::path& path);
void save_likes(const std::filesystem::path& path, const LikesMatrix& likes);

// Schema: user_id,item_id,rating
RatingsTable load_ratings(const std::filesystem::path& path);
void save_ratings(const std::filesystem::path& path, const RatingsTable& ratings);

// Schema: sender_id,recipient_id,item_id,shared
std::vector<ShareRecord> load_shares(const std::filesystem::path& path);
void save_shares(const std::filesystem::path& path, const std::vector<ShareRecord>& shares);

// Schema: item_id,ext_rating,ext_popularity
std::map<ItemId, ItemMeta> load_items(const std::filesystem::path& path);
void save_items(const std::filesystem::path& path, const std::map<ItemId, ItemMeta>& items);

// Schema: user_a,user_b,item_id,provenance with provenance in {own_a,own_b,both};
// rows for one pair are contiguous and ordered by presentation.
std::vector<DyadSession> load_sessions(const std::filesystem::path& path);
void save_sessions(const std::filesystem::path& path, const std::vector<DyadSession>& sessions);

}  // namespace prefshare::csv
