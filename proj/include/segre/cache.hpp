// Append-only JSONL cache of per-block strand ranks. One line per
// (algebra, field, p, q, bidegree) block; reruns load the file and skip
// every elimination whose result is already recorded.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace segre {

class MonomialAlgebra;

struct BlockRankRecord {
  std::string algebra;  // MonomialAlgebra::describe()
  std::string field;    // FieldSpec::name()
  int p = 0, q = 0;
  int u1 = 0, u2 = 0;
  std::size_t dim_prev = 0, dim_mid = 0, dim_next = 0;
  std::size_t rank_in = 0, rank_out = 0;
};

struct CacheStats {
  std::size_t records = 0;
  std::map<std::string, std::size_t> by_algebra;
};

class RankCache {
 public:
  // Empty dir disables persistence (lookup always misses, store is a no-op).
  explicit RankCache(std::string dir);

  std::optional<BlockRankRecord> lookup(const std::string& algebra, const std::string& field,
                                        int p, int q, int u1, int u2) const;
  void store(const BlockRankRecord& rec);

  static void clear(const std::string& dir);
  static CacheStats stats(const std::string& dir);
  static std::string file_path(const std::string& dir);

 private:
  std::string dir_;
  std::map<std::string, BlockRankRecord> records_;
};

}  // namespace segre
