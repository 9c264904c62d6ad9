#include <segre/render.hpp>

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include <segre/rings.hpp>

namespace segre {

std::optional<GridWindow> tight_window(const BidegreeTable& t) {
  if (t.entries.empty()) return std::nullopt;
  GridWindow w;
  w.u1_min = w.u1_max = t.entries.begin()->first.u1;
  w.u2_min = w.u2_max = t.entries.begin()->first.u2;
  for (const auto& [bd, dim] : t.entries) {
    if (dim == 0) continue;
    w.u1_min = std::min(w.u1_min, bd.u1);
    w.u1_max = std::max(w.u1_max, bd.u1);
    w.u2_min = std::min(w.u2_min, bd.u2);
    w.u2_max = std::max(w.u2_max, bd.u2);
  }
  return w;
}

namespace {

std::string render_grid(const BidegreeTable& t, bool rotate,
                        std::optional<GridWindow> window, char sep) {
  auto w = window ? window : tight_window(t);
  if (!w) return "0\n";  // empty table: a single zero cell
  auto cell = [&](int u1, int u2) -> std::size_t {
    auto it = t.entries.find(Bidegree{u1, u2});
    return it == t.entries.end() ? 0 : it->second;
  };
  std::string out;
  if (rotate) {
    for (int u1 = w->u1_min; u1 <= w->u1_max; ++u1) {
      for (int u2 = w->u2_min; u2 <= w->u2_max; ++u2) {
        if (u2 > w->u2_min) out += sep;
        out += std::to_string(cell(u1, u2));
      }
      out += '\n';
    }
  } else {
    for (int u2 = w->u2_max; u2 >= w->u2_min; --u2) {
      for (int u1 = w->u1_min; u1 <= w->u1_max; ++u1) {
        if (u1 > w->u1_min) out += sep;
        out += std::to_string(cell(u1, u2));
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace

std::string grid_ascii(const BidegreeTable& t, bool rotate,
                       std::optional<GridWindow> window) {
  return render_grid(t, rotate, window, ' ');
}

std::string grid_csv(const BidegreeTable& t, bool rotate,
                     std::optional<GridWindow> window) {
  return render_grid(t, rotate, window, ',');
}

std::string betti_json(const MonomialAlgebra& alg, const FieldSpec& field,
                       const BidegreeTable& t) {
  nlohmann::ordered_json j;
  if (alg.kind() == MonomialAlgebra::Kind::segre) {
    j["algebra"] = "segre";
    j["a"] = alg.a();
    j["b"] = alg.b();
  } else {
    j["algebra"] = "scroll";
    j["e"] = alg.e();
  }
  j["p"] = t.p;
  j["q"] = t.q;
  j["field"] = field.name();
  j["betti"] = t.total;
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& [bd, dim] : t.entries) {  // map order is already lex
    blocks.push_back({{"bidegree", {bd.u1, bd.u2}}, {"dim", dim}});
  }
  j["blocks"] = std::move(blocks);
  return j.dump() + "\n";
}

std::string betti_table_ascii(const BettiTable& t) {
  std::size_t width = 1;
  for (const auto& [pq, k] : t.entries)
    width = std::max(width, std::to_string(k).size());
  for (int p = 0; p <= t.max_p; ++p)
    width = std::max(width, std::to_string(p).size());

  std::ostringstream out;
  out << t.algebra << " over " << t.field << ", kappa_{p,q} for p <= "
      << t.max_p << "\n";
  auto pad = [&](const std::string& s) {
    out << ' ' << std::string(width - s.size(), ' ') << s;
  };
  out << "q\\p";
  for (int p = 0; p <= t.max_p; ++p) pad(std::to_string(p));
  out << '\n';
  for (int q = 0; q <= 3; ++q) {
    out << "  " << q;
    for (int p = 0; p <= t.max_p; ++p) pad(std::to_string(t.kappa(p, q)));
    out << '\n';
  }
  return out.str();
}

std::string betti_table_csv(const BettiTable& t) {
  std::string out = "p,q0,q1,q2,q3\n";
  for (int p = 0; p <= t.max_p; ++p) {
    out += std::to_string(p);
    for (int q = 0; q <= 3; ++q) out += ',' + std::to_string(t.kappa(p, q));
    out += '\n';
  }
  return out;
}

std::string betti_table_json(const BettiTable& t) {
  nlohmann::ordered_json j;
  j["algebra"] = t.algebra;
  if (t.a > 0) {
    j["a"] = t.a;
    j["b"] = t.b;
  }
  j["field"] = t.field;
  j["max_p"] = t.max_p;
  auto rows = nlohmann::ordered_json::array();
  for (int q = 0; q <= 3; ++q) {
    auto row = nlohmann::ordered_json::array();
    for (int p = 0; p <= t.max_p; ++p) row.push_back(t.kappa(p, q));
    rows.push_back(std::move(row));
  }
  j["table"] = std::move(rows);
  return j.dump() + "\n";
}

}  // namespace segre
