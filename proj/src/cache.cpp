#include "segre/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segre/field.hpp"

namespace segre {

namespace {

using nlohmann::ordered_json;

std::string record_key(const std::string& algebra, const std::string& field, int p, int q, int u1,
                       int u2) {
  std::ostringstream os;
  os << algebra << '|' << field << '|' << p << '|' << q << '|' << u1 << '|' << u2;
  return os.str();
}

BlockRankRecord parse_line(const std::string& line, const std::string& path) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail("CacheCorrupt", "unparsable record in " + path + "; run `betti cache clear`");
  }
  try {
    BlockRankRecord rec;
    rec.algebra = j.at("algebra").get<std::string>();
    rec.p = j.at("p").get<int>();
    rec.q = j.at("q").get<int>();
    rec.u1 = j.at("bidegree").at(0).get<int>();
    rec.u2 = j.at("bidegree").at(1).get<int>();
    rec.dim_prev = j.at("dims").at(0).get<std::size_t>();
    rec.dim_mid = j.at("dims").at(1).get<std::size_t>();
    rec.dim_next = j.at("dims").at(2).get<std::size_t>();
    rec.rank_in = j.at("rank_in").get<std::size_t>();
    rec.rank_out = j.at("rank_out").get<std::size_t>();
    rec.field = j.at("field").get<std::string>();
    return rec;
  } catch (const ordered_json::exception& e) {
    fail("CacheCorrupt", "bad record in " + path + " (" + e.what() + "); run `betti cache clear`");
  }
}

std::string serialize(const BlockRankRecord& rec) {
  ordered_json j;
  j["algebra"] = rec.algebra;
  j["p"] = rec.p;
  j["q"] = rec.q;
  j["bidegree"] = {rec.u1, rec.u2};
  j["dims"] = {rec.dim_prev, rec.dim_mid, rec.dim_next};
  j["rank_in"] = rec.rank_in;
  j["rank_out"] = rec.rank_out;
  j["field"] = rec.field;
  return j.dump();
}

}  // namespace

std::string RankCache::file_path(const std::string& dir) {
  return (std::filesystem::path(dir) / "rank-cache.jsonl").string();
}

RankCache::RankCache(std::string dir) : dir_(std::move(dir)) {
  if (dir_.empty()) return;
  std::filesystem::create_directories(dir_);
  std::ifstream in(file_path(dir_));
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    BlockRankRecord rec = parse_line(line, file_path(dir_));
    records_[record_key(rec.algebra, rec.field, rec.p, rec.q, rec.u1, rec.u2)] = rec;
  }
}

std::optional<BlockRankRecord> RankCache::lookup(const std::string& algebra,
                                                 const std::string& field, int p, int q, int u1,
                                                 int u2) const {
  auto it = records_.find(record_key(algebra, field, p, q, u1, u2));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void RankCache::store(const BlockRankRecord& rec) {
  std::string key = record_key(rec.algebra, rec.field, rec.p, rec.q, rec.u1, rec.u2);
  if (records_.count(key)) return;
  records_[key] = rec;
  if (dir_.empty()) return;
  std::ofstream out(file_path(dir_), std::ios::app);
  if (!out) fail("CacheWriteFailed", "cannot append to " + file_path(dir_));
  out << serialize(rec) << '\n';
}

void RankCache::clear(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::remove(file_path(dir), ec);
}

CacheStats RankCache::stats(const std::string& dir) {
  CacheStats s;
  if (dir.empty()) return s;
  std::ifstream in(file_path(dir));
  if (!in) return s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    BlockRankRecord rec = parse_line(line, file_path(dir));
    ++s.records;
    ++s.by_algebra[rec.algebra + " / " + rec.field];
  }
  return s;
}

}  // namespace segre
