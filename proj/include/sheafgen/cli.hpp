#pragma once

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "invariants.hpp"
#include "suites.hpp"

namespace sheafgen::cli {

using json = nlohmann::ordered_json;

// On-disk store of exact block series keyed by (kind, params, trunc, root order).
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  static std::string key(const std::string& kind, const std::vector<long>& params, const BigRat& trunc, int s) {
    std::string k = kind;
    for (long p : params) k += "_" + std::to_string(p);
    std::string t = trunc.get_str();
    for (char& c : t)
      if (c == '/') c = 'o';
    return k + "_T" + t + "_s" + std::to_string(s) + ".series";
  }

  QSeries get(const std::string& kind, const std::vector<long>& params, const BigRat& trunc, int s,
              const std::function<QSeries()>& compute) {
    const auto path = dir_ / key(kind, params, trunc, s);
    {
      std::ifstream in(path);
      if (in) {
        std::stringstream ss;
        ss << in.rdbuf();
        try {
          QSeries q = parse_series_text(ss.str());
          if (q.root_order() == s && q.trunc() == trunc) {
            std::lock_guard<std::mutex> lock(mu_);
            ++hits_;
            return q;
          }
        } catch (const error&) {
          // unreadable entry: recompute and overwrite
        }
      }
    }
    QSeries q = compute();
    std::string tmp_name;
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++misses_;
      tmp_name = path.filename().string() + ".tmp" + std::to_string(++serial_);
    }
    const auto tmp = dir_ / tmp_name;
    {
      std::ofstream out(tmp);
      out << to_text(q);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
    return q;
  }

  BlockSource blocks() {
    BlockSource b;
    b.h_r = [this](long r, const BigRat& t, int s) { return get("H", {r}, t, s, [&] { return h_r_series(r, t, s); }); };
    b.b_rk = [this](long r, long k, const BigRat& t, int s) {
      return get("B", {r, k}, t, s, [&] { return b_rk_series(r, k, t, s); });
    };
    return b;
  }

  long hits() const { return hits_; }
  long misses() const { return misses_; }

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
  long hits_ = 0, misses_ = 0, serial_ = 0;
};

inline json bigint_json(const BigInt& v) {
  if (v.fits_slong_p()) return json(v.get_si());
  return json(v.get_str());
}

inline json betti_json(long r, long d, const std::vector<BettiRow>& rows) {
  json j;
  j["rank"] = r;
  j["c1_degree"] = d;
  j["rows"] = json::array();
  for (const auto& row : rows) {
    json jr;
    jr["c2"] = row.c2;
    jr["betti"] = json::array();
    for (const auto& b : row.betti) jr["betti"].push_back(bigint_json(b));
    bool odd = false;
    for (const auto& b : row.odd_betti) odd = odd || b != 0;
    if (odd) {
      jr["odd_betti"] = json::array();
      for (const auto& b : row.odd_betti) jr["odd_betti"].push_back(bigint_json(b));
    }
    jr["euler"] = bigint_json(row.euler);
    j["rows"].push_back(std::move(jr));
  }
  return j;
}

inline std::string betti_csv(const std::vector<BettiRow>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.lower_half().size());
  std::ostringstream os;
  os << "c2";
  for (std::size_t j = 0; j < width; ++j) os << ",b" << 2 * j;
  os << ",euler\n";
  for (const auto& r : rows) {
    const auto h = r.lower_half();
    os << r.c2;
    for (std::size_t j = 0; j < width; ++j) {
      os << ",";
      if (j < h.size()) os << h[j].get_str();
    }
    os << "," << r.euler.get_str() << "\n";
  }
  return os.str();
}

inline std::string betti_text(long r, long d, const BigRat& trunc, const std::vector<BettiRow>& rows) {
  std::ostringstream os;
  os << "rank " << r << ", c1 = " << d << "H, series truncation q^" << trunc.get_str() << "\n";
  for (const auto& row : rows) {
    os << "c2=" << row.c2 << " dim=" << row.dim << " b:";
    for (const auto& b : row.lower_half()) os << " " << b.get_str();
    os << " euler=" << row.euler.get_str() << "\n";
  }
  return os.str();
}

inline json series_json(const QSeries& q) {
  json j;
  j["root_order"] = q.root_order();
  j["trunc"] = q.trunc().get_str();
  j["terms"] = json::array();
  for (const auto& [e, c] : q.coefficients())
    j["terms"].push_back({{"exponent", e.get_str()}, {"numerator", c.num().str()}, {"denominator", c.den().str()}});
  return j;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

inline std::string series_csv(const QSeries& q) {
  std::ostringstream os;
  os << "exponent,numerator,denominator\n";
  for (const auto& [e, c] : q.coefficients()) os << e.get_str() << "," << csv_field(c.num().str()) << "," << csv_field(c.den().str()) << "\n";
  return os.str();
}

inline json report_json(const CheckReport& r) {
  json j;
  j["suite"] = r.suite;
  j["passed"] = r.passed();
  j["items"] = json::array();
  for (const auto& i : r.items) j["items"].push_back({{"name", i.name}, {"status", status_name(i.status)}, {"detail", i.detail}});
  return j;
}

struct RunConfig {
  std::string format = "text";
  unsigned jobs = 1;
  std::string cache_dir;
  std::string config;
  // blocks
  std::string what;
  long r = 1, k = 0, c = 1;
  std::string qmax = "2";
  // betti
  long d = 0;
  std::string c2_range;
  // check
  std::string suite = "all";
  std::string trunc;
};

inline std::pair<long, long> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const long v = std::stol(s);
      return {v, v};
    }
    return {std::stol(s.substr(0, dots)), std::stol(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw domain_error("c2 range must look like A..B, got '" + s + "'");
  }
}

inline BigRat parse_trunc(const std::string& s) {
  try {
    return parse_rat(s);
  } catch (const std::exception&) {
    throw domain_error("bad truncation '" + s + "'");
  }
}

// Exit codes: 0 success, 1 identity or pipeline failure, 2 usage or domain error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact q-series engine for sheaf invariants on Sigma_1 and P^2", "sheafgen"};
  app.fallthrough();
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--cache-dir", cfg.cache_dir, "Directory for cached block series");
  app.set_config("--config", "", "File of key = value lines");

  auto* blocks = app.add_subcommand("blocks", "Expand eta, theta1, H_r or B_{r,k}");
  blocks->add_option("--what", cfg.what)->required()->check(CLI::IsMember({"eta", "theta1", "Hr", "Brk"}));
  blocks->add_option("--r", cfg.r);
  blocks->add_option("--k", cfg.k);
  blocks->add_option("--c", cfg.c, "theta1 argument multiple of z");
  blocks->add_option("--qmax", cfg.qmax, "q-orders beyond the leading term");

  auto* betti = app.add_subcommand("betti", "Betti and Euler numbers of moduli on P^2");
  betti->add_option("--r", cfg.r)->required();
  betti->add_option("--d", cfg.d)->required();
  betti->add_option("--c2", cfg.c2_range, "A..B")->required();
  betti->add_option("--k", cfg.k, "Blow-up twist");

  auto* check = app.add_subcommand("check", "Run an identity suite");
  check->add_option("--suite", cfg.suite);
  check->add_option("--trunc", cfg.trunc, "Suite truncation override");

  std::vector<std::string> argv_s{"sheafgen"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  bool flag_given = false;
  for (const auto& a : args) flag_given = flag_given || a == "--cache-dir" || a.rfind("--cache-dir=", 0) == 0;
  if (!flag_given)
    if (const char* env = std::getenv("SHEAFGEN_CACHE"); env && *env) cfg.cache_dir = env;

  try {
    std::unique_ptr<DiskCache> disk;
    BlockSource source;
    AssemblyOptions assembly;
    assembly.jobs = cfg.jobs;
    if (!cfg.cache_dir.empty()) {
      disk = std::make_unique<DiskCache>(cfg.cache_dir);
      source = disk->blocks();
      assembly.blocks = &source;
    }

    if (*blocks) {
      if ((cfg.what == "Hr" || cfg.what == "Brk") && cfg.r < 1) throw domain_error("--r must be positive");
      // --qmax counts q-orders beyond the leading exponent of the requested block
      BigRat lead = rat(1, 24);
      if (cfg.what == "theta1")
        lead = rat(1, 8);
      else if (cfg.what == "Hr")
        lead = rat(-cfg.r, 6);
      else if (cfg.what == "Brk")
        lead = b_rk_leading_exponent(cfg.r, cfg.k);
      const BigRat T = lead + parse_trunc(cfg.qmax);
      QSeries q(T);
      if (cfg.what == "eta")
        q = eta_series(T);
      else if (cfg.what == "theta1")
        q = theta1_tilde(cfg.c, T);
      else if (cfg.what == "Hr")
        q = source.H(cfg.r, T, kRootOrder);
      else
        q = source.B(cfg.r, cfg.k, T, kRootOrder);
      if (cfg.format == "json")
        out << series_json(q).dump(2) << "\n";
      else if (cfg.format == "csv")
        out << series_csv(q);
      else
        out << to_text(q);
      return 0;
    }

    if (*betti) {
      const auto [lo, hi] = parse_range(cfg.c2_range);
      BettiTableOptions bo;
      bo.assembly = assembly;
      bo.k = cfg.k;
      const auto rows = betti_table(cfg.r, cfg.d, lo, hi, bo);
      if (cfg.format == "json")
        out << betti_json(cfg.r, cfg.d, rows).dump(2) << "\n";
      else if (cfg.format == "csv")
        out << betti_csv(rows);
      else
        out << betti_text(cfg.r, cfg.d, ChernCharacter::p2_c2(cfg.r, cfg.d, hi).exponent(), rows);
      return 0;
    }

    SuiteOptions so;
    so.assembly = assembly;
    if (!cfg.trunc.empty()) so.trunc = parse_trunc(cfg.trunc);
    std::vector<CheckReport> reports;
    bool found = false;
    for (const auto& [name, fn] : check_suites()) {
      if (cfg.suite != "all" && cfg.suite != name) continue;
      found = true;
      reports.push_back(fn(so));
    }
    if (!found) {
      err << "usage error: unknown suite '" << cfg.suite << "'\n";
      return 2;
    }
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.passed();
    if (cfg.format == "json") {
      json j = json::array();
      for (const auto& r : reports) j.push_back(report_json(r));
      out << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
      out << "suite,name,status,detail\n";
      for (const auto& r : reports)
        for (const auto& i : r.items)
          out << r.suite << "," << csv_field(i.name) << "," << status_name(i.status) << "," << csv_field(i.detail) << "\n";
    } else {
      for (const auto& r : reports) {
        out << "suite " << r.suite << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
        for (const auto& i : r.items) out << "  " << status_name(i.status) << "  " << i.name << "  [" << i.detail << "]\n";
      }
    }
    return ok ? 0 : 1;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sheafgen::cli
