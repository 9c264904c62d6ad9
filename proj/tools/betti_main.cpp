// Command-line front end. Subcommands:
//   betti     one graded Betti number, or the whole table with --full
//   bidegree  torus-weight decomposition of one entry, printed as a grid
//   verify    en | relres | chainmap | kernel | cocycles check suites
//   cache     clear | stats for the on-disk rank cache
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <segre/cache.hpp>
#include <segre/cocycles.hpp>
#include <segre/field.hpp>
#include <segre/koszul.hpp>
#include <segre/render.hpp>
#include <segre/resolutions.hpp>
#include <segre/rings.hpp>

namespace {

using segre::BidegreeTable;
using segre::FieldSpec;
using segre::MonomialAlgebra;

struct CommonOpts {
  int a = 0, b = 0;
  std::vector<int> e;
  std::string field = "gf32003";
  std::string format = "ascii";
  std::string cache_dir;
  int threads = 1;
};

FieldSpec parse_field(const std::string& s) {
  if (s == "rational") return FieldSpec::rationals();
  std::string digits = (s == "prime") ? "32003" : s;
  if (digits.rfind("gf", 0) == 0) digits = digits.substr(2);
  unsigned long v = 0;
  try {
    std::size_t used = 0;
    v = std::stoul(digits, &used);
    if (used != digits.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    segre::fail("InvalidParameters",
                "--field wants 'rational', 'prime', or an odd prime like 32003 (got '" + s + "')");
  }
  return FieldSpec::gf(static_cast<std::uint32_t>(v));
}

// The engine accepts either factor order; the command line keeps the
// normalized convention so output filenames and cache keys stay canonical.
MonomialAlgebra make_algebra(const CommonOpts& c) {
  if (!c.e.empty()) {
    if (c.a > 0 || c.b > 0)
      segre::fail("InvalidParameters", "give either --a/--b or --e, not both");
    return MonomialAlgebra::scroll(c.e);
  }
  if (c.a < 1 || c.b < c.a)
    segre::fail("InvalidParameters", "need 1 <= a <= b (got a=" + std::to_string(c.a) +
                                         ", b=" + std::to_string(c.b) + ")");
  return MonomialAlgebra::segre(c.a, c.b);
}

segre::StrandOptions strand_options(const CommonOpts& c) {
  segre::StrandOptions o;
  o.field = parse_field(c.field);
  if (c.threads < 1) segre::fail("InvalidParameters", "--threads must be >= 1");
  o.threads = c.threads;
  o.cache_dir = c.cache_dir;
  if (const char* env = std::getenv("BETTI_CACHE_DIR")) o.cache_dir = env;
  return o;
}

std::string algebra_label(const MonomialAlgebra& alg) { return alg.describe(); }

void check_format(const std::string& f) {
  if (f != "ascii" && f != "csv" && f != "json")
    segre::fail("InvalidParameters", "--format wants ascii, csv, or json (got '" + f + "')");
}

int cmd_betti(const CommonOpts& c, int p, int q, bool full, int max_p) {
  check_format(c.format);
  auto alg = make_algebra(c);
  auto opts = strand_options(c);

  if (full) {
    int n = alg.n_generators();
    if (max_p < 0) max_p = n - 3;
    auto t = segre::full_betti_table(alg, max_p, opts);
    if (c.format == "json")
      std::cout << segre::betti_table_json(t);
    else if (c.format == "csv")
      std::cout << segre::betti_table_csv(t);
    else
      std::cout << segre::betti_table_ascii(t);
    return 0;
  }

  if (p < 0) segre::fail("InvalidParameters", "--p is required (or pass --full)");
  auto t = segre::bidegree_table(alg, p, q, opts);
  if (c.format == "json") {
    std::cout << segre::betti_json(alg, opts.field, t);
    return 0;
  }
  if (c.format == "csv") {
    if (alg.kind() == MonomialAlgebra::Kind::segre)
      std::cout << "a,b,p,q,field,betti\n"
                << c.a << ',' << c.b << ',' << p << ',' << q << ','
                << opts.field.name() << ',' << t.total << "\n";
    else {
      std::string es;
      for (std::size_t i = 0; i < c.e.size(); ++i)
        es += (i ? ";" : "") + std::to_string(c.e[i]);
      std::cout << "e,p,q,field,betti\n"
                << es << ',' << p << ',' << q << ',' << opts.field.name()
                << ',' << t.total << "\n";
    }
    return 0;
  }
  std::cout << "kappa_{" << p << ',' << q << "}(" << algebra_label(alg)
            << ") over " << opts.field.name() << " = " << t.total << "\n";
  if (alg.kind() == MonomialAlgebra::Kind::segre && q == 1 && alg.a() >= 3 &&
      p >= alg.a() * alg.b() + alg.a() - 1) {
    auto cf = segre::closed_form_first_row(alg.a(), alg.b(), p);
    std::cout << "closed form " << cf << ", " << (cf == t.total ? "AGREE" : "DISAGREE")
              << "\n";
  }
  return 0;
}

int cmd_bidegree(const CommonOpts& c, int p, int q, bool rotate,
                 const std::vector<int>& window) {
  check_format(c.format);
  auto alg = make_algebra(c);
  auto opts = strand_options(c);
  if (p < 0) segre::fail("InvalidParameters", "--p is required");

  std::optional<segre::GridWindow> win;
  if (!window.empty()) {
    if (window.size() != 4)
      segre::fail("InvalidParameters",
                  "--window wants u1min,u1max,u2min,u2max (4 integers)");
    win = segre::GridWindow{window[0], window[1], window[2], window[3]};
  }

  auto t = segre::bidegree_table(alg, p, q, opts);
  if (c.format == "json") {
    std::cout << segre::betti_json(alg, opts.field, t);
  } else if (c.format == "csv") {
    std::cout << segre::grid_csv(t, rotate, win);
  } else {
    std::cout << segre::grid_ascii(t, rotate, win);
    std::cout << "total: " << t.total << "\n";
  }
  return 0;
}

// Every suite returns a line-per-check report ending in "overall: PASS|FAIL";
// the exit code mirrors that verdict.
int run_suite(const segre::VerifyReport& rep) {
  std::cout << rep.text;
  return rep.pass ? 0 : 1;
}

std::string resolve_cache_dir(const CommonOpts& c) {
  std::string dir = c.cache_dir;
  if (const char* env = std::getenv("BETTI_CACHE_DIR")) dir = env;
  if (dir.empty())
    segre::fail("InvalidParameters",
                "no cache directory: pass --cache DIR or set BETTI_CACHE_DIR");
  return dir;
}

int cmd_cache_clear(const CommonOpts& c) {
  auto dir = resolve_cache_dir(c);
  segre::RankCache::clear(dir);
  std::cout << "cache cleared: " << segre::RankCache::file_path(dir) << "\n";
  return 0;
}

int cmd_cache_stats(const CommonOpts& c) {
  auto dir = resolve_cache_dir(c);
  auto st = segre::RankCache::stats(dir);
  std::cout << "cache: " << segre::RankCache::file_path(dir) << "\n"
            << "records: " << st.records << "\n";
  for (const auto& [key, n] : st.by_algebra)
    std::cout << "  " << key << ": " << n << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graded Betti tables of Segre embeddings of P1xP1 and rational normal scrolls"};
  app.require_subcommand(1);

  CommonOpts c;
  int p = -1, q = 1, max_p = -1;
  bool full = false, rotate = false;
  std::vector<int> window;

  auto add_common = [&](CLI::App* cmd, bool algebra_flags) {
    if (algebra_flags) {
      cmd->add_option("--a", c.a, "first factor degree");
      cmd->add_option("--b", c.b, "second factor degree");
      cmd->add_option("--e", c.e, "scroll column degrees, comma separated")
          ->delimiter(',');
    }
    cmd->add_option("--field", c.field, "rational, prime, or an odd prime modulus");
    cmd->add_option("--format", c.format, "ascii, csv, or json");
    cmd->add_option("--threads", c.threads, "worker threads for block elimination");
    cmd->add_option("--cache", c.cache_dir, "rank cache directory (BETTI_CACHE_DIR overrides)");
  };

  auto* betti = app.add_subcommand("betti", "graded Betti number kappa_{p,q}");
  add_common(betti, true);
  betti->add_option("--p", p, "homological position");
  betti->add_option("--q", q, "internal degree (0..3)");
  betti->add_flag("--full", full, "whole table for p <= max-p");
  betti->add_option("--max-p", max_p, "last column of --full (default: #variables - 3)");

  auto* bidegree = app.add_subcommand("bidegree", "torus bidegree table of one entry");
  add_common(bidegree, true);
  bidegree->add_option("--p", p, "homological position")->required();
  bidegree->add_option("--q", q, "internal degree (0..3)");
  bidegree->add_flag("--rotate", rotate, "rows u1 ascending instead of columns");
  bidegree->add_option("--window", window, "u1min,u1max,u2min,u2max print window")
      ->delimiter(',');

  int en_twist = 0, p_index = 2, max_deg = 3;
  auto* verify = app.add_subcommand("verify", "check suites, one report line per check");
  verify->require_subcommand(1);

  auto* v_en = verify->add_subcommand("en", "scroll-module resolution: exact and minimal");
  add_common(v_en, false);
  v_en->add_option("--e", c.e, "scroll column degrees, comma separated")
      ->delimiter(',')
      ->required();
  v_en->add_option("--c", en_twist, "twist of the resolved module")->required();
  v_en->add_option("--max-deg", max_deg, "check ambient degrees 0..max-deg");

  auto* v_relres = verify->add_subcommand("relres", "surface resolution over the scroll: exact");
  auto* v_chainmap = verify->add_subcommand("chainmap", "column-append chain-map squares commute");
  auto* v_kernel = verify->add_subcommand("kernel", "kernel dimension and explicit spanning set");
  auto* v_cocycles = verify->add_subcommand("cocycles", "explicit syzygies: cocycle, witness and rank checks");
  for (CLI::App* cmd : {v_relres, v_chainmap, v_kernel, v_cocycles}) {
    add_common(cmd, false);
    cmd->add_option("--a", c.a, "first factor degree")->required();
    cmd->add_option("--b", c.b, "second factor degree")->required();
  }
  v_relres->add_option("--max-deg", max_deg, "check ambient degrees 0..max-deg");
  v_chainmap->add_option("--p-index", p_index, "ladder stage; covers the twist p-index*b");
  v_chainmap->add_option("--max-deg", max_deg, "check coefficient degrees 0..max-deg");

  auto* cache = app.add_subcommand("cache", "on-disk rank cache maintenance");
  auto* cache_clear = cache->add_subcommand("clear", "remove every record");
  auto* cache_stats = cache->add_subcommand("stats", "record counts per algebra");
  add_common(cache_clear, false);
  add_common(cache_stats, false);
  cache->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
  }

  try {
    if (betti->parsed()) return cmd_betti(c, p, q, full, max_p);
    if (bidegree->parsed()) return cmd_bidegree(c, p, q, rotate, window);
    if (v_en->parsed())
      return run_suite(segre::verify_en_exactness(c.e, en_twist, max_deg, parse_field(c.field)));
    if (v_relres->parsed())
      return run_suite(segre::verify_relative_resolution(c.a, c.b, max_deg, parse_field(c.field)));
    if (v_chainmap->parsed())
      return run_suite(segre::verify_chain_map_squares(c.a, c.b, p_index, max_deg));
    if (v_kernel->parsed())
      return run_suite(segre::verify_kernel_lemma(c.a, c.b, parse_field(c.field)));
    if (v_cocycles->parsed())
      return run_suite(segre::verify_cocycle_suite(c.a, c.b, strand_options(c)));
    if (cache_clear->parsed()) return cmd_cache_clear(c);
    if (cache_stats->parsed()) return cmd_cache_stats(c);
  } catch (const segre::ComputationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    bool usage = e.code == "InvalidParameters" || e.code == "NonPrimeModulus";
    return usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
