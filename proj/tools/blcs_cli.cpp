// blcs: command-line front end for the binary LCS approximation library.
//
// Exit codes: 0 success, 1 computation or contract error, 2 usage or parse
// error. Data goes to stdout, diagnostics to stderr.

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blcs/blcs.hpp"

namespace {

using json = nlohmann::json;
using namespace blcs;

constexpr std::size_t kInlineCap = 1'000'000;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BitString read_stream(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bits(buf.str());
}

/// Regular files are memory-mapped; "-" and pipes are read as streams.
BitString read_file(const std::string& path) {
  if (path == "-") return read_stream(std::cin);
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw UsageError("cannot open '" + path + "'");
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw UsageError("cannot stat '" + path + "'");
  }
  if (!S_ISREG(st.st_mode)) {
    ::close(fd);
    std::ifstream in(path, std::ios::binary);
    return read_stream(in);
  }
  if (st.st_size == 0) {
    ::close(fd);
    return BitString();
  }
  void* p = ::mmap(nullptr, static_cast<std::size_t>(st.st_size), PROT_READ, MAP_PRIVATE, fd, 0);
  ::close(fd);
  if (p == MAP_FAILED) throw UsageError("cannot map '" + path + "'");
  try {
    BitString s = parse_bits(std::string_view(static_cast<const char*>(p), static_cast<std::size_t>(st.st_size)));
    ::munmap(p, static_cast<std::size_t>(st.st_size));
    return s;
  } catch (...) {
    ::munmap(p, static_cast<std::size_t>(st.st_size));
    throw;
  }
}

struct Input {
  std::string str;
  std::string file;

  void attach(CLI::App* app, const std::string& name) {
    auto* s = app->add_option("--" + name + "-str", str, "inline bit string for " + name);
    auto* f = app->add_option("--" + name + "-file", file, "file holding the bits of " + name + " (- for stdin)");
    s->excludes(f);
    f->excludes(s);
  }

  BitString load(const std::string& name) const {
    if (!file.empty()) return read_file(file);
    if (str.size() > kInlineCap) throw UsageError("--" + name + "-str is capped at 10^6 bits; use --" + name + "-file");
    return parse_bits(str);
  }
};

struct Common {
  Input x, y;
  std::string profile = "desk";
  std::vector<std::string> sets;
  std::string format = "json";
  std::string eq_oracle = "exact";
  std::string imb_oracle = "exact";

  void attach(CLI::App* app, bool need_y, bool oracles) {
    x.attach(app, "x");
    if (need_y) y.attach(app, "y");
    app->add_option("--profile", profile, "parameter profile")->check(CLI::IsMember({"paper", "desk"}));
    app->add_option("--set", sets, "override a parameter, name=value");
    app->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv", "plain"}));
    if (oracles) {
      app->add_option("--eq-oracle", eq_oracle, "equal-length LCS stand-in")
          ->check(CLI::IsMember({"exact", "trivial"}));
      app->add_option("--imb-oracle", imb_oracle, "imbalanced-case stand-in")
          ->check(CLI::IsMember({"exact", "trivial"}));
    }
  }

  Params params() const {
    Params p = Params::named(profile);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects name=value, got '" + kv + "'");
      p.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    p.validate();
    return p;
  }
};

void print_value(const Common& c, const std::string& key, std::uint64_t v) {
  if (c.format == "json") std::cout << json{{key, v}}.dump() << "\n";
  else if (c.format == "csv") std::cout << key << "\n" << v << "\n";
  else std::cout << v << "\n";
}

std::string chain_csv(const std::vector<CertifiedRectangle>& chain, const std::optional<BitString>& sub) {
  std::string out = rectangles_csv(chain);
  if (sub) out += "reconstructed_subsequence," + sub->to_string() + "\n";
  return out;
}

// approx ---------------------------------------------------------------------

struct ApproxCmd {
  Common c;
  bool check_exact = false;
  std::string trace_path;
  bool reconstruct = false;

  void attach(CLI::App* app) {
    c.attach(app, true, true);
    app->add_flag("--check-exact", check_exact, "run the exact DP and assert trivial <= bound <= exact");
    app->add_option("--trace", trace_path, "write the chosen rectangle chain as CSV to this path");
    app->add_flag("--reconstruct", reconstruct, "reconstruct a common subsequence of the reported length");
  }

  int run() const {
    const BitString x = c.x.load("x");
    const BitString y = c.y.load("y");
    const Params p = c.params();
    const auto eq = make_eq_oracle(c.eq_oracle);
    const auto imb = make_imbalanced_oracle(c.imb_oracle);
    ApproxOptions opt;
    opt.trace_chain = !trace_path.empty();
    opt.reconstruct = reconstruct;
    const ApproxResult r = approx_lcs(x, y, p, {eq.get(), imb.get()}, opt);

    std::optional<std::uint64_t> exact;
    if (check_exact) {
      exact = exact_lcs(x, y);
      if (r.bound < r.trivial || r.bound > *exact) {
        std::cerr << "check-exact failed: trivial=" << r.trivial << " bound=" << r.bound << " exact=" << *exact << "\n";
        return 1;
      }
    }
    if (reconstruct && r.subsequence) {
      if (!is_subsequence(*r.subsequence, x) || !is_subsequence(*r.subsequence, y)) {
        std::cerr << "reconstruction is not a common subsequence\n";
        return 1;
      }
    }
    if (!trace_path.empty()) {
      std::ofstream f(trace_path);
      if (!f) throw UsageError("cannot write '" + trace_path + "'");
      static const std::vector<CertifiedRectangle> none;
      f << chain_csv(r.pipeline ? r.pipeline->chain : none, reconstruct ? r.subsequence : std::nullopt);
    }

    if (c.format == "json") {
      json j;
      j["bound"] = r.bound;
      j["trivial"] = r.trivial;
      if (exact) {
        j["exact"] = *exact;
        j["ratio"] = *exact == 0 ? 1.0 : static_cast<double>(r.bound) / static_cast<double>(*exact);
      }
      j["case_trace"] = r.trace.labels();
      j["params_profile"] = std::string(to_string(p.profile));
      if (r.block_width) j["block_width"] = r.block_width;
      if (reconstruct && r.subsequence) j["reconstructed_subsequence"] = r.subsequence->to_string();
      std::cout << j.dump() << "\n";
    } else if (c.format == "csv") {
      std::cout << "bound,trivial,exact,case\n"
                << r.bound << "," << r.trivial << "," << (exact ? std::to_string(*exact) : "") << ","
                << r.trace.case_label().value_or("") << "\n";
    } else {
      std::cout << r.bound << "\n";
    }
    return 0;
  }
};

// exact / trivial --------------------------------------------------------------

struct PairCmd {
  Common c;
  bool exact = true;

  void attach(CLI::App* app) { c.attach(app, true, false); }

  int run() const {
    const BitString x = c.x.load("x");
    const BitString y = c.y.load("y");
    if (exact) print_value(c, "exact", exact_lcs(x, y));
    else print_value(c, "trivial", trivial_lcs(x, y));
    return 0;
  }
};

// classify ---------------------------------------------------------------------

struct ClassifyCmd {
  Common c;

  void attach(CLI::App* app) { c.attach(app, false, false); }

  int run() const {
    const BitString x = c.x.load("x");
    Params p = c.params();
    const std::size_t w = p.w_override ? *p.w_override : Params::default_block_width(x.size());
    p = p.with_block_width(w);
    if (c.format == "json") {
      json blocks = json::array();
      for (std::size_t b = 0; (b + 1) * w <= x.size(); ++b) {
        const PType t = get_p_type(x.substr({static_cast<index_t>(b * w), static_cast<index_t>((b + 1) * w)}), p);
        json e{{"block_index", b}, {"kind", std::string(t.kind_name())}};
        if (t.classified()) e["ell"] = t.ell;
        if (t.is_coarse()) e["bit"] = t.bit ? 1 : 0;
        blocks.push_back(e);
      }
      std::cout << json{{"w", w}, {"blocks", blocks}}.dump() << "\n";
      return 0;
    }
    if (c.format == "csv") std::cout << "block_index,kind,ell,bit\n";
    const char sep = c.format == "csv" ? ',' : '\t';
    for (std::size_t b = 0; (b + 1) * w <= x.size(); ++b) {
      const PType t = get_p_type(x.substr({static_cast<index_t>(b * w), static_cast<index_t>((b + 1) * w)}), p);
      std::cout << b << sep << t.kind_name() << sep << (t.classified() ? std::to_string(t.ell) : "-") << sep
                << (t.is_coarse() ? (t.bit ? "1" : "0") : "-") << "\n";
    }
    return 0;
  }
};

// cover ------------------------------------------------------------------------

struct CoverCmd {
  Common c;
  bool dump = false;

  void attach(CLI::App* app) {
    c.attach(app, true, true);
    app->add_flag("--dump", dump, "print every rectangle as CSV in canonical order");
  }

  int run() const {
    const BitString x0 = c.x.load("x");
    const BitString y0 = c.y.load("y");
    if (x0.ones() != x0.zeros()) throw ContractError("cover: x must have 0(x) = 1(x)");
    Params p = c.params().with_layout(x0.size(), y0.size());
    auto [x, y] = truncate_to_blocks(x0, y0, p.w);
    if (x.size() != x0.size() || y.size() != y0.size()) {
      std::cerr << "truncated " << x0.size() - x.size() << " bits of x and " << y0.size() - y.size()
                << " bits of y to multiples of w=" << p.w << "\n";
    }
    p.m_x = x.size() / p.w;
    p.m_y = y.size() / p.w;
    const auto eq = make_eq_oracle(c.eq_oracle);
    const auto rects = cover(x, y, p, *eq);
    if (dump) {
      std::cout << rectangles_csv(rects);
      return 0;
    }
    const CoverCounts n = count_sources(rects);
    json j{{"w", p.w},           {"gamma_w", p.gamma_w()},     {"theta_w", p.theta_w()},
           {"total", n.total()}, {"global", n.global},        {"trivial", n.trivial},
           {"trivial_square", n.trivial_square}, {"eq_lcs", n.eq_lcs}, {"structure", n.structure},
           {"bound", full_lcs(x, y, rects, p).bound}};
    std::cout << j.dump() << "\n";
    return 0;
  }
};

// bench / gen ------------------------------------------------------------------

struct BenchCmd {
  std::vector<std::string> families;
  std::size_t length_x = 256;
  std::size_t length_y = 512;
  std::size_t seeds = 10;
  std::uint64_t seed_base = 1;
  std::size_t exact_cap = 4096;
  Common c;

  void attach(CLI::App* app) {
    app->add_option("--family", families, "generator spec (repeatable)")->required();
    app->add_option("--length-x", length_x, "length of x");
    app->add_option("--length-y", length_y, "length of y");
    app->add_option("--seeds", seeds, "seeds per family");
    app->add_option("--seed-base", seed_base, "first seed");
    app->add_option("--exact-cap", exact_cap, "skip the exact DP above this length");
    app->add_option("--profile", c.profile, "parameter profile")->check(CLI::IsMember({"paper", "desk"}));
    app->add_option("--set", c.sets, "override a parameter, name=value");
    app->add_option("--eq-oracle", c.eq_oracle)->check(CLI::IsMember({"exact", "trivial"}));
    app->add_option("--imb-oracle", c.imb_oracle)->check(CLI::IsMember({"exact", "trivial"}));
  }

  int run() const {
    const Params p = c.params();
    std::vector<bench::Instance> instances;
    for (const auto& f : families) {
      bench::parse_spec(f, length_x);  // validate early
      for (std::size_t s = 0; s < seeds; ++s) instances.push_back({f, length_x, length_y, seed_base + s});
    }
    const auto eq = make_eq_oracle(c.eq_oracle);
    const auto imb = make_imbalanced_oracle(c.imb_oracle);
    bench::SuiteOptions opt;
    opt.exact_cap = exact_cap;
    opt.workers = bench::workers_from_env();
    const auto rows = bench::run_suite(instances, p, {eq.get(), imb.get()}, opt);
    std::cout << bench::csv_header();
    for (const auto& r : rows) std::cout << bench::csv_row(r);
    return 0;
  }
};

struct GenCmd {
  std::string spec;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  bool balance = false;

  void attach(CLI::App* app) {
    app->add_option("--spec", spec, "generator spec, e.g. uniform(1/2)")->required();
    app->add_option("--length", length, "number of bits")->required();
    app->add_option("--seed", seed, "64-bit seed");
    app->add_flag("--balance", balance, "flip the rightmost surplus bits so that 0(x) = 1(x)");
  }

  int run() const {
    BitString s = bench::generate(bench::parse_spec(spec, length), seed);
    if (balance) {
      if (length % 2 != 0) throw ConfigError("--balance needs an even length");
      auto bits = s.unpack();
      std::size_t ones = s.ones();
      for (std::size_t i = bits.size(); i-- > 0 && ones != length / 2;) {
        if (ones > length / 2 && bits[i]) bits[i] = 0, --ones;
        else if (ones < length / 2 && !bits[i]) bits[i] = 1, ++ones;
      }
      s = BitString::from_bits(bits);
    }
    std::cout << s.to_string() << "\n";
    return 0;
  }
};

// dev --------------------------------------------------------------------------

struct DevWindowCmd {
  Common c;
  index_t lo = 0, hi = 0;

  void attach(CLI::App* app) {
    c.attach(app, true, false);
    app->add_option("--lo", lo, "imin I")->required();
    app->add_option("--hi", hi, "imax I")->required();
  }

  int run() const {
    const BitString x = c.x.load("x");
    const BitString y = c.y.load("y");
    x.check({lo, hi});
    const Interval j = oracle::matched_window(exact_lcs_traced(x, y).trace, {lo, hi});
    std::cout << json{{"lo", j.lo}, {"hi", j.hi}}.dump() << "\n";
    return 0;
  }
};

struct DevBruteCmd {
  std::string rects;

  void attach(CLI::App* app) {
    app->add_option("--rects", rects, "rectangles as ilo,ihi,jlo,jhi,kappa;...")->required();
  }

  int run() const {
    std::vector<CertifiedRectangle> rs;
    std::stringstream all(rects);
    std::string item;
    while (std::getline(all, item, ';')) {
      if (item.empty()) continue;
      std::stringstream one(item);
      std::vector<std::uint32_t> v;
      std::string tok;
      while (std::getline(one, tok, ',')) {
        try {
          v.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        } catch (const std::exception&) {
          throw UsageError("bad rectangle field '" + tok + "'");
        }
      }
      if (v.size() != 5 || v[0] > v[1] || v[2] > v[3]) throw UsageError("bad rectangle '" + item + "'");
      rs.push_back({{v[0], v[1]}, {v[2], v[3]}, v[4], Source::global});
    }
    std::cout << oracle::brute_ordered_max(rs) << "\n";
    return 0;
  }
};

struct DevBadCmd {
  Common c;
  std::size_t block = 0;

  void attach(CLI::App* app) {
    c.attach(app, true, false);
    app->add_option("--block", block, "block width w'")->required();
  }

  int run() const {
    const BitString x = c.x.load("x");
    const BitString y = c.y.load("y");
    const auto rep = oracle::lemma_bad_check(x, y, block, c.params());
    std::cout << json{{"holds", rep.holds},
                      {"vacuous", rep.vacuous},
                      {"blocks", rep.blocks},
                      {"bad_blocks", rep.bad_blocks},
                      {"limit", rational::to_string(rep.limit)}}
                     .dump()
              << "\n";
    return rep.holds ? 0 : 1;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound lower bounds on the LCS of binary strings"};
  app.require_subcommand(1, 1);

  ApproxCmd approx;
  PairCmd exact;
  PairCmd trivial;
  trivial.exact = false;
  ClassifyCmd classify;
  CoverCmd cov;
  BenchCmd bench_cmd;
  GenCmd gen;
  DevWindowCmd dev_window;
  DevBruteCmd dev_brute;
  DevBadCmd dev_bad;

  approx.attach(app.add_subcommand("approx", "approximate LCS lower bound"));
  exact.attach(app.add_subcommand("exact", "exact LCS by dynamic programming"));
  trivial.attach(app.add_subcommand("trivial", "longest common constant run"));
  classify.attach(app.add_subcommand("classify", "structure type of every w-block of x"));
  cov.attach(app.add_subcommand("cover", "certified rectangles"));
  bench_cmd.attach(app.add_subcommand("bench", "generate instances and report bounds and timings as CSV"));
  gen.attach(app.add_subcommand("gen", "print a generated bit string"));
  auto* dev = app.add_subcommand("dev", "test-support oracles");
  dev->require_subcommand(1, 1);
  dev_window.attach(dev->add_subcommand("matched-window", "window of y matched to x_I"));
  dev_brute.attach(dev->add_subcommand("brute-max", "brute-force best ordered collection"));
  dev_bad.attach(dev->add_subcommand("lemma-bad", "count blocks with a poor matched window"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("approx")) return approx.run();
    if (app.got_subcommand("exact")) return exact.run();
    if (app.got_subcommand("trivial")) return trivial.run();
    if (app.got_subcommand("classify")) return classify.run();
    if (app.got_subcommand("cover")) return cov.run();
    if (app.got_subcommand("bench")) return bench_cmd.run();
    if (app.got_subcommand("gen")) return gen.run();
    if (dev->got_subcommand("matched-window")) return dev_window.run();
    if (dev->got_subcommand("brute-max")) return dev_brute.run();
    if (dev->got_subcommand("lemma-bad")) return dev_bad.run();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
