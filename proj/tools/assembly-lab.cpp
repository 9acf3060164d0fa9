// assembly-lab: batch CLI over the assemblies library.
//
// Exit codes: 0 success, 2 invalid input, 3 hypothesis-not-met (bounds),
// 4 trial budget exceeded.

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "assemblies/bounds.hpp"
#include "assemblies/exact.hpp"
#include "assemblies/samplers.hpp"
#include "assemblies/spec.hpp"
#include "assemblies/stats.hpp"
#include "assemblies/tilted.hpp"

namespace {

constexpr const char* kVersion = "assembly-lab 1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitBudget = 4;

using assemblies::AssemblySpec;
using assemblies::BigInt;
using assemblies::BigRat;

struct CommonArgs {
  std::string assembly = "set-partitions";
  std::string assembly_file;
  std::uint64_t n = 0;
  std::int64_t k = -1;
  std::int64_t r = -1;
  double t = -1.0;
  std::uint64_t ell = 1;
  double x = -1.0;
  double theta = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t samples = 100;
  std::string mode = "exact";
  std::string sampler = "exact-dnk";
  bool sd = false;
  std::uint64_t jobs = 1;
  std::string out;
};

std::string timestamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

AssemblySpec load_spec(const CommonArgs& a) {
  if (!a.assembly_file.empty()) return AssemblySpec::from_json_file(a.assembly_file);
  return AssemblySpec::builtin(a.assembly);
}

nlohmann::json manifest_json(const std::string& command, const CommonArgs& a,
                             const AssemblySpec& spec) {
  nlohmann::json m;
  m["command"] = command;
  m["assembly"] = a.assembly_file.empty() ? a.assembly : a.assembly_file;
  m["assembly_name"] = spec.name();
  nlohmann::json p;
  p["n"] = a.n;
  if (a.k >= 0) p["k"] = a.k;
  if (a.r >= 0) p["r"] = a.r;
  if (a.t >= 0.0) p["t"] = a.t;
  p["ell"] = a.ell;
  if (a.x >= 0.0) p["x"] = a.x;
  p["theta"] = a.theta;
  p["seed"] = a.seed;
  p["samples"] = a.samples;
  p["mode"] = a.mode;
  p["sampler"] = a.sampler;
  p["jobs"] = a.jobs;
  m["parameters"] = p;
  m["tool_version"] = kVersion;
  m["timestamp"] = timestamp_now();
  return m;
}

// CSV outputs carry the manifest as leading comment lines; the timestamp
// sits on its own line so reruns differ only there
std::string manifest_csv(const nlohmann::json& m) {
  std::ostringstream os;
  os << "# " << kVersion << "\n";
  os << "# command=" << m["command"].get<std::string>()
     << " assembly=" << m["assembly"].get<std::string>()
     << " parameters=" << m["parameters"].dump() << "\n";
  os << "# timestamp=" << m["timestamp"].get<std::string>() << "\n";
  return os.str();
}

void emit(const CommonArgs& a, const std::string& text) {
  if (a.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + a.out);
  f << text;
}

std::string cache_dir() {
  const char* env = std::getenv("ASSEMBLY_LAB_CACHE");
  return env ? env : "";
}

int cmd_count(const CommonArgs& a) {
  AssemblySpec spec = load_spec(a);
  if (a.n == 0) throw std::invalid_argument("count: --n >= 1 required");
  std::ostringstream body;
  body << "n,k,count\n";

  std::string cache_path;
  std::string dir = cache_dir();
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    cache_path = dir + "/count-" + spec.name() + "-" + std::to_string(a.n) + ".csv";
  }
  std::string triangle;
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    std::ifstream in(cache_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    triangle = buf.str();
  } else {
    assemblies::CountTable table(spec, a.n);
    std::ostringstream tri;
    for (std::size_t n = 0; n <= a.n; ++n) {
      for (std::size_t k = 0; k <= n; ++k) tri << n << "," << k << "," << table.pnk(n, k) << "\n";
      tri << n << ",total," << table.p(n) << "\n";
    }
    triangle = tri.str();
    if (!cache_path.empty()) {
      std::ofstream out(cache_path, std::ios::binary);
      out << triangle;
    }
  }

  if (a.k >= 0) {
    // filter the single requested row
    std::istringstream in(triangle);
    std::string line;
    std::string want = std::to_string(a.n) + "," + std::to_string(a.k) + ",";
    while (std::getline(in, line)) {
      if (line.rfind(want, 0) == 0) body << line << "\n";
    }
  } else {
    body << triangle;
  }
  emit(a, manifest_csv(manifest_json("count", a, spec)) + body.str());
  return kExitOk;
}

int cmd_law(const CommonArgs& a) {
  AssemblySpec spec = load_spec(a);
  if (a.n == 0) throw std::invalid_argument("law: --n >= 1 required");
  std::uint64_t r;
  if (a.r >= 0) {
    r = static_cast<std::uint64_t>(a.r);
  } else if (a.k >= 0) {
    if (static_cast<std::uint64_t>(a.k) > a.n) throw std::invalid_argument("law: k > n");
    r = a.n - static_cast<std::uint64_t>(a.k);
  } else {
    throw std::invalid_argument("law: --k or --r required");
  }
  if (r > 60) {
    // partition counts explode; refuse with the cost spelled out
    assemblies::LargestPartTable pt(120);
    throw std::invalid_argument(
        "law: r > 60 not supported in low-rank mode (the support has "
        "p(r) copartitions; p(120) alone is " +
        pt.total().get_str() + "); use bounds or sampling instead");
  }
  auto mode = a.mode == "log" ? assemblies::NumericMode::log_space
                              : assemblies::NumericMode::exact;
  auto law = assemblies::low_rank_law(spec, a.n, r, mode);

  nlohmann::json j;
  j["manifest"] = manifest_json("law", a, spec);
  j["n"] = law.n;
  j["k"] = law.k;
  j["r"] = law.r;
  j["mode"] = a.mode;
  nlohmann::json support = nlohmann::json::array();
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    nlohmann::json row;
    row["copartition"] = law.support[i].str();
    if (mode == assemblies::NumericMode::exact) {
      row["prob"] = law.prob[i].get_str();
      row["prob_double"] = assemblies::to_double(law.prob[i]);
    } else {
      row["log_prob"] = law.log_prob[i];
      row["prob_double"] = std::exp(law.log_prob[i]);
    }
    support.push_back(row);
  }
  j["support"] = support;
  j["l1_pmf"] = law.l1_pmf;
  j["parts_pmf"] = law.parts_pmf;
  emit(a, j.dump(2) + "\n");
  return kExitOk;
}

double choose_x(const CommonArgs& a, const AssemblySpec& spec, bool for_boltzmann) {
  if (a.x >= 0.0) return a.x;
  if (for_boltzmann) return assemblies::solve_x_T(spec, a.n);
  std::size_t k = a.k >= 0 ? static_cast<std::size_t>(a.k)
                           : a.n - static_cast<std::size_t>(std::max<std::int64_t>(a.r, 0));
  try {
    return assemblies::solve_x_p1(spec, a.n, k, assemblies::XPolicy::ratio);
  } catch (const assemblies::no_solution_error&) {
    // the closed-form saddle needs n > 2r; fall back to the E T_n = n root
    return assemblies::solve_x_T(spec, a.n);
  }
}

int cmd_sample(const CommonArgs& a) {
  AssemblySpec spec = load_spec(a);
  if (a.n == 0) throw std::invalid_argument("sample: --n >= 1 required");
  bool boltzmann_like = a.sampler == "boltzmann" || a.sampler == "k2" ||
                        a.sampler == "exact-cn";
  assemblies::SamplerConfig cfg;
  cfg.spec = &spec;
  cfg.n = a.n;
  cfg.k = a.k >= 0 ? static_cast<std::size_t>(a.k) : 0;
  cfg.theta = a.theta;
  cfg.seed = a.seed;
  cfg.x = choose_x(a, spec, boltzmann_like);
  if ((a.sampler == "k1" || a.sampler == "exact-dnk") && cfg.k == 0)
    throw std::invalid_argument("sample: this sampler needs --k");
  if (a.sampler == "k2") {
    auto tx = assemblies::solve_theta_x(spec, a.n, cfg.k);
    cfg.theta = tx.theta;
    if (a.x < 0.0) cfg.x = tx.x;
  }

  std::unique_ptr<assemblies::YSampler> ys;
  if (a.sampler == "k1" || a.sampler == "exact-dnk") {
    ys = std::make_unique<assemblies::YSampler>(spec, cfg.x, assemblies::YSupport::finite,
                                                a.n);
  }

  struct Row {
    std::string text;
    bool accepted = true;
    std::uint64_t trials = 1;
  };
  std::vector<Row> rows(a.samples);
  auto run_one = [&](std::uint64_t i) {
    assemblies::Rng rng = assemblies::Rng::worker_stream(cfg.seed, i);
    std::ostringstream os;
    Row row;
    if (a.sampler == "boltzmann" || a.sampler == "k2") {
      auto z = assemblies::sample_boltzmann(cfg, rng);
      std::uint64_t kk = 0, tt = 0;
      for (std::size_t s = 1; s <= z.size(); ++s) {
        kk += z[s - 1];
        tt += s * z[s - 1];
      }
      os << i << "," << kk << "," << tt;
    } else if (a.sampler == "k1") {
      auto s = assemblies::sample_k_v1(cfg, *ys, rng);
      os << i << "," << cfg.k << "," << s.total << ","
         << assemblies::copartition(assemblies::PartitionType::from_counts(s.counts)).str();
    } else if (a.sampler == "exact-dnk") {
      auto rep = assemblies::sample_exact_dnk(cfg, *ys, rng);
      row.accepted = rep.accepted;
      row.trials = rep.trials_used;
      os << i << "," << rep.trials_used << ","
         << (rep.accepted ? rep.copart.str() : std::string("BUDGET"));
    } else if (a.sampler == "exact-cn") {
      auto rep = assemblies::sample_exact_cn(cfg, rng);
      row.accepted = rep.accepted;
      row.trials = rep.trials_used;
      std::uint64_t kk = 0;
      for (auto c : rep.counts) kk += c;
      os << i << "," << rep.trials_used << "," << kk << ","
         << (rep.accepted ? rep.copart.str() : std::string("BUDGET"));
    } else {
      throw std::invalid_argument("sample: unknown sampler " + a.sampler);
    }
    row.text = os.str();
    rows[i] = std::move(row);
  };

  // per-sample seed streams keep the output independent of --jobs
  std::uint64_t jobs = std::max<std::uint64_t>(a.jobs, 1);
  if (jobs == 1 || a.samples < 2) {
    for (std::uint64_t i = 0; i < a.samples; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (std::uint64_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t i = next.fetch_add(1); i < a.samples; i = next.fetch_add(1))
          run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::uint64_t accepted = 0, trials = 0;
  for (const auto& row : rows) {
    accepted += row.accepted;
    trials += row.trials;
  }
  std::ostringstream body;
  if (a.sampler == "boltzmann" || a.sampler == "k2") body << "index,k,t\n";
  else if (a.sampler == "k1") body << "index,k,total,copartition\n";
  else if (a.sampler == "exact-dnk") body << "index,trials,copartition\n";
  else body << "index,trials,k,copartition\n";
  for (const auto& row : rows) body << row.text << "\n";
  body << "# x=" << cfg.x << " theta=" << cfg.theta << "\n";
  if (trials > 0) {
    body << "# accepted=" << accepted << " trials=" << trials
         << " acceptance_rate=" << (static_cast<double>(accepted) / std::max<std::uint64_t>(trials, 1))
         << "\n";
  }
  emit(a, manifest_csv(manifest_json("sample", a, spec)) + body.str());
  if (a.samples > 0 && accepted < a.samples &&
      (a.sampler == "exact-dnk" || a.sampler == "exact-cn")) {
    return kExitBudget;
  }
  return kExitOk;
}

int cmd_bounds(const CommonArgs& a) {
  AssemblySpec spec = load_spec(a);
  if (a.n == 0) throw std::invalid_argument("bounds: --n >= 1 required");
  std::uint64_t r;
  if (a.r >= 0) r = static_cast<std::uint64_t>(a.r);
  else if (a.k >= 0) r = a.n - static_cast<std::uint64_t>(a.k);
  else throw std::invalid_argument("bounds: --k or --r required");

  assemblies::BoundsReport rep;
  rep.assembly = spec.name();
  rep.n = a.n;
  rep.k = a.n - r;
  rep.r = r;
  auto l23 = assemblies::lemma23_bound(spec, a.n, r);
  rep.y = l23.y;
  rep.l1_eq3_bound = l23.bound;
  auto l24 = assemblies::lemma24_bound(spec, a.n, r);
  rep.x = l24.x;
  rep.rho = l24.rho;
  rep.hyp_24 = l24.hyp_24;
  rep.hyp_needed = l24.hyp_needed;
  rep.u4 = l24.u4;
  rep.xsum_lower = l24.xsum_lower;
  auto sandwich = assemblies::thm15_sandwich(spec, a.n, r);
  if (sandwich.z < std::numeric_limits<double>::infinity()) rep.z = sandwich.z;
  rep.log_pnk_lower = sandwich.log_lower;
  rep.log_pnk_upper = sandwich.log_upper;

  nlohmann::json j = nlohmann::json::parse(rep.to_json());
  j["manifest"] = manifest_json("bounds", a, spec);
  if (a.sd) {
    auto sd = assemblies::sd_bounds(spec, a.n, a.n - r, 0);
    j["sd"] = nlohmann::json::parse(sd.to_json());
  }
  emit(a, j.dump(2) + "\n");
  if (!rep.hyp_24 || !rep.hyp_needed || !sandwich.effective) return kExitHypothesis;
  return kExitOk;
}

int cmd_limit_experiment(const CommonArgs& a) {
  AssemblySpec spec = load_spec(a);
  std::ostringstream body;

  if (a.t < 0.0 && a.r >= 0) {
    // Integer-partition contrast: mean largest part of a uniform
    // partition of r against the (1/2c) sqrt(r) log r growth scale.
    std::uint64_t r = static_cast<std::uint64_t>(a.r);
    if (r < 2) throw std::invalid_argument("limit-experiment: contrast needs --r >= 2");
    assemblies::LargestPartTable table(r);
    double c = M_PI / std::sqrt(6.0);
    double normalizer = std::sqrt(static_cast<double>(r)) * std::log(static_cast<double>(r)) /
                        (2.0 * c);
    body << "r,mean_largest_part,normalizer,ratio,median\n";
    body << r << "," << table.mean() << "," << normalizer << ","
         << table.mean() / normalizer << "," << table.quantile(0.5) << "\n";
    emit(a, manifest_csv(manifest_json("limit-experiment", a, spec)) + body.str());
    return kExitOk;
  }

  if (a.t < 0.0) throw std::invalid_argument("limit-experiment: --t (or contrast --r) required");
  if (a.n == 0) throw std::invalid_argument("limit-experiment: --n >= 1 required");

  double edge = static_cast<double>(a.ell) / static_cast<double>(a.ell + 1);
  std::vector<std::uint64_t> grid = {a.n / 16, a.n / 4, a.n};
  body << "n,r,method,p_l1_low,p_l1_high,prediction,abs_err,ci95_half\n";
  for (std::uint64_t n : grid) {
    if (n < 4) throw std::invalid_argument("limit-experiment: grid point below n=4");
    std::uint64_t r = static_cast<std::uint64_t>(
        std::llround(a.t * std::pow(static_cast<double>(n), edge)));
    if (r == 0 || 2 * r >= n)
      throw std::invalid_argument("limit-experiment: infeasible grid point (r vs n)");
    double lambda = assemblies::lambda_limit_ell(spec, a.t, a.ell);
    double prediction = std::exp(-lambda);  // P(L1 = ell+1) target
    if (r <= 60) {
      auto law = assemblies::low_rank_law(spec, n, r, assemblies::NumericMode::log_space);
      double p_low = law.prob_L1_eq(a.ell + 1);
      double p_high = law.prob_L1_ge(a.ell + 2);
      body << n << "," << r << ",exact," << p_low << "," << p_high << "," << prediction
           << "," << std::fabs(p_low - prediction) << ",\n";
    } else {
      // Monte Carlo through the hard-rejection sampler
      std::size_t k = n - static_cast<std::size_t>(r);
      assemblies::SamplerConfig cfg;
      cfg.spec = &spec;
      cfg.n = n;
      cfg.k = k;
      cfg.seed = a.seed;
      cfg.x = assemblies::solve_x_p1(spec, n, k, assemblies::XPolicy::ratio);
      assemblies::YSampler ys(spec, cfg.x, assemblies::YSupport::finite, n);
      std::uint64_t hits_low = 0, got = 0;
      for (std::uint64_t i = 0; i < a.samples; ++i) {
        assemblies::Rng rng = assemblies::Rng::worker_stream(a.seed, i);
        auto rep = assemblies::sample_exact_dnk(cfg, ys, rng);
        if (!rep.accepted) return kExitBudget;
        ++got;
        std::size_t l1 = rep.copart.parts.empty() ? 1 : rep.copart.largest() + 1;
        if (l1 == a.ell + 1) ++hits_low;
      }
      double p_low = got ? static_cast<double>(hits_low) / got : 0.0;
      double ci = got ? 1.96 * std::sqrt(p_low * (1.0 - p_low) / got) : 0.0;
      body << n << "," << r << ",monte-carlo," << p_low << "," << (1.0 - p_low) << ","
           << prediction << "," << std::fabs(p_low - prediction) << "," << ci << "\n";
    }
  }
  emit(a, manifest_csv(manifest_json("limit-experiment", a, spec)) + body.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{kVersion};
  app.require_subcommand(1);
  CommonArgs args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--assembly", args.assembly);
    sub->add_option("--assembly-file", args.assembly_file);
    sub->add_option("--n", args.n);
    sub->add_option("--k", args.k);
    sub->add_option("--r", args.r);
    sub->add_option("--t", args.t);
    sub->add_option("--ell", args.ell);
    sub->add_option("--x", args.x);
    sub->add_option("--theta", args.theta);
    sub->add_option("--seed", args.seed);
    sub->add_option("--samples", args.samples);
    sub->add_option("--mode", args.mode)->check(CLI::IsMember({"exact", "log"}));
    sub->add_option("--sampler", args.sampler)
        ->check(CLI::IsMember({"boltzmann", "k1", "k2", "exact-dnk", "exact-cn"}));
    sub->add_flag("--sd", args.sd);
    sub->add_option("--jobs", args.jobs);
    sub->add_option("--out", args.out);
  };

  auto* count = app.add_subcommand("count", "p(n) and p(n,k) tables");
  auto* law = app.add_subcommand("law", "exact component-structure law");
  auto* sample = app.add_subcommand("sample", "component-process samplers");
  auto* bounds = app.add_subcommand("bounds", "effective bound reports");
  auto* limit = app.add_subcommand("limit-experiment", "limit-law convergence tables");
  for (auto* sub : {count, law, sample, bounds, limit}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (count->parsed()) return cmd_count(args);
    if (law->parsed()) return cmd_law(args);
    if (sample->parsed()) return cmd_sample(args);
    if (bounds->parsed()) return cmd_bounds(args);
    if (limit->parsed()) return cmd_limit_experiment(args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const assemblies::unsupported_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const assemblies::divergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const assemblies::no_solution_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
