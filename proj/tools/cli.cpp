#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinchain/chains.hpp"
#include "spinchain/diagnostics.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/graph.hpp"
#include "spinchain/models.hpp"
#include "spinchain/thresholds.hpp"

namespace spinchain::cli {

namespace {

struct GraphArgs {
  std::string file;
  std::vector<std::size_t> regular;  // n, d
  std::string format;
  std::uint64_t seed = 7;

  void add(CLI::App* app) {
    app->add_option("--graph", file, "Graph file (edge list, or binary for .bin/.adj)");
    app->add_option("--graph-format", format, "Override the extension: edges | binary")
        ->check(CLI::IsMember({"edges", "binary"}));
    app->add_option("--random-regular", regular, "Generate a random regular graph: N D")->expected(2);
    app->add_option("--graph-seed", seed, "Seed for --random-regular")->capture_default_str();
  }

  Graph load() const {
    if (!file.empty() && !regular.empty()) throw DomainError("give either --graph or --random-regular, not both");
    if (!regular.empty()) {
      Rng rng(seed);
      return generate_random_regular(regular[0], regular[1], rng);
    }
    if (file.empty()) throw DomainError("a graph is required: --graph FILE or --random-regular N D");
    if (format.empty()) return load_graph_file(file);
    return load_graph_file(file, format == "binary" ? GraphFormat::binary : GraphFormat::edge_list);
  }
};

struct ModelArgs {
  std::string kind = "hardcore";
  std::optional<double> lambda, beta, gamma;
  std::string per_site, params;

  void add(CLI::App* app) {
    app->add_option("--model", kind, "hardcore | ising | two-spin")
        ->check(CLI::IsMember({"hardcore", "ising", "two-spin"}))
        ->capture_default_str();
    app->add_option("--lambda", lambda, "Fugacity / external field");
    app->add_option("--beta", beta, "Edge activity for ++ edges");
    app->add_option("--gamma", gamma, "Edge activity for -- edges (two-spin)");
    app->add_option("--per-site-lambda", per_site, "File with one fugacity per vertex (hardcore)");
    app->add_option("--params", params, "key=value model file; flags override it");
  }

  std::map<std::string, std::string> map() const {
    std::map<std::string, std::string> kv;
    if (!params.empty()) {
      std::ifstream in(params);
      if (!in) throw ParseError("cannot open model file " + params);
      kv = parse_key_value(in);
    }
    if (!kv.count("model") || kind != "hardcore") kv["model"] = kind;
    auto num = [](double v) {
      std::ostringstream s;
      s.precision(17);
      s << v;
      return s.str();
    };
    if (lambda) kv["lambda"] = num(*lambda);
    if (beta) kv["beta"] = num(*beta);
    if (gamma) kv["gamma"] = num(*gamma);
    if (!per_site.empty()) kv["per_site_lambda"] = per_site;
    return kv;
  }

  bool given() const { return lambda || beta || gamma || !per_site.empty() || !params.empty(); }

  Model build(const Graph& g) const { return build_model(model_spec_from_map(map()), g); }
};

std::uint64_t default_horizon(const ChainSpec& chain, std::size_t n, double eps) {
  const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  const bool single_site = chain.name == "glauber" || chain.name == "balanced";
  const double base = 8.0 * std::log(nn / eps);
  return static_cast<std::uint64_t>(std::ceil(single_site ? nn * base : base));
}

SpinConfig start_config(const std::string& start, const Model& m, const Graph& g, Rng& rng) {
  const std::size_t n = g.num_vertices();
  SpinConfig config(n, false);
  if (start == "empty") return config;
  if (start == "post-scan") {
    systematic_scan_pass(m, g, config, identity_order(n), rng);
    return config;
  }
  if (start.rfind("hex:", 0) == 0) {
    config = SpinConfig::from_hex(start.substr(4), n);
    if (const auto* p = std::get_if<TwoSpinParams>(&m); p && p->flipped) config.flip_all();
    if (is_hardcore(m) && !is_independent_set(g, config)) throw DomainError("start configuration is not independent");
    return config;
  }
  throw DomainError("start must be empty, post-scan or hex:<digits>");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out_default, std::ostream& err) {
  CLI::App app{"Spin-system samplers, exact oracles and diagnostics", "spinchain"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 7;
  std::string output;
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("-o,--output", output, "Write results to this file instead of stdout");

  GraphArgs graph;
  ModelArgs model;

  // sample
  auto* sample = app.add_subcommand("sample", "Run a chain and emit configurations or counts");
  std::string chain = "glauber", emit = "config", path = "auto", start = "empty";
  std::uint64_t steps = 1000, stride = 1;
  double eps = 0.05;
  graph.add(sample);
  model.add(sample);
  sample->add_option("--chain", chain, "glauber | scan[:order=..] | balanced[:K=..] | field[:..] | interleaved[:..]")
      ->capture_default_str();
  sample->add_option("--steps", steps, "Public steps (rounds for scan, field, interleaved)")->capture_default_str();
  sample->add_option("--stride", stride, "Emit every stride-th step")->capture_default_str()->check(CLI::PositiveNumber);
  sample->add_option("--emit", emit, "config | count | trace")
      ->check(CLI::IsMember({"config", "count", "trace"}))
      ->capture_default_str();
  sample->add_option("--update-path", path, "naive | factory | auto")->capture_default_str();
  sample->add_option("--start", start, "empty | post-scan | hex:<digits>")->capture_default_str();
  sample->add_option("--eps", eps, "Target accuracy for automatic inner step counts")->capture_default_str();

  // mix
  auto* mix = app.add_subcommand("mix", "Estimate TV distance to the exact distribution");
  std::optional<std::uint64_t> horizon;
  std::string mix_start = "post-scan";
  std::size_t ensemble = 20000;
  graph.add(mix);
  model.add(mix);
  mix->add_option("--chain", chain, "Chain, e.g. glauber or balanced:K=2")->capture_default_str();
  mix->add_option("--T", horizon, "Steps; default 8 n log(n/eps) for single-site chains, 8 log(n/eps) rounds otherwise");
  mix->add_option("--ensemble", ensemble, "Independent chains")->capture_default_str()->check(CLI::PositiveNumber);
  mix->add_option("--eps", eps, "Accuracy used for default T")->capture_default_str();
  mix->add_option("--start", mix_start, "empty | post-scan")->capture_default_str();
  mix->add_option("--update-path", path, "naive | factory | auto")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Run the oracle invariant suite or the acceptance criteria");
  std::string suite = "oracle";
  std::vector<int> criteria;
  bool timings = false, json = false;
  verify->add_option("--suite", suite, "oracle | acceptance")
      ->check(CLI::IsMember({"oracle", "acceptance"}))
      ->capture_default_str();
  verify->add_option("--criterion", criteria, "Acceptance criterion id (repeatable)");
  verify->add_flag("--timings", timings, "Report wall-clock seconds");
  verify->add_flag("--json", json, "JSON lines instead of one text line per check");

  // concentrate
  auto* conc = app.add_subcommand("concentrate", "Tail probabilities of a Lipschitz function");
  std::size_t samples = 100000;
  std::string function = "count", format = "json";
  std::uint64_t burn = 30, thin = 0;
  graph.add(conc);
  model.add(conc);
  conc->add_option("--samples", samples, "Retained samples")->capture_default_str();
  conc->add_option("--function", function, "count | constant")->capture_default_str();
  conc->add_option("--burn", burn, "Interleaved-sampler rounds before sampling")->capture_default_str();
  conc->add_option("--thin", thin, "Glauber updates between samples (0 = n)")->capture_default_str();
  conc->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  conc->add_option("--update-path", path, "naive | factory | auto")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Factory cost profile at the center of a star");
  std::vector<std::size_t> degrees{8, 64, 512};
  std::vector<double> betas;
  double bench_lambda = 1.0, alpha = 8.0;
  std::size_t trials = 100000;
  bench->add_option("--degrees", degrees, "Star degrees")->delimiter(',')->capture_default_str();
  bench->add_option("--beta", betas, "Edge activities (default D/(D+1) per degree)")->delimiter(',');
  bench->add_option("--lambda", bench_lambda, "External field")->capture_default_str();
  bench->add_option("--alpha", alpha, "Factory cap parameter")->capture_default_str();
  bench->add_option("--trials", trials, "Updates per grid point")->capture_default_str();

  // thresholds
  auto* thr = app.add_subcommand("thresholds", "Uniqueness thresholds and regime classification");
  double delta = 0.0;
  int max_degree = 3;
  model.add(thr);
  thr->add_option("--delta", delta, "Requested gap")->capture_default_str();
  thr->add_option("--max-degree", max_degree, "Maximum degree")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out_default << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out_default << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }

  std::ofstream file_out;
  if (!output.empty()) {
    file_out.open(output);
    if (!file_out) {
      err << "error: cannot open " << output << " for writing\n";
      return 2;
    }
  }
  std::ostream& out = output.empty() ? out_default : file_out;

  try {
    if (*sample) {
      const Graph g = graph.load();
      const Model m = model.build(g);
      const auto spec = ChainSpec::parse(chain);
      Rng rng(seed);
      ScheduleOptions opts;
      opts.steps = steps;
      opts.stride = stride;
      opts.record_trace = false;
      opts.path = parse_update_path(path);
      opts.eps = eps;
      opts.on_config = [&](std::uint64_t step, const SpinConfig& c) {
        if (emit == "config") {
          out << c.to_hex() << '\n';
        } else if (emit == "count") {
          out << c.count() << '\n';
        } else {
          out << TraceRecord{step, c.count(), c.hash(), std::nullopt}.to_json() << '\n';
        }
      };
      SpinConfig s = start_config(start, m, g, rng);
      const auto res = run_schedule(spec, m, g, std::move(s), rng, opts);
      err << "update path: " << res.path_description << '\n';
      if (res.stats.updates) err << "factory stats: " << res.stats.to_json() << '\n';
      return 0;
    }
    if (*mix) {
      const Graph g = graph.load();
      const Model m = model.build(g);
      const auto spec = ChainSpec::parse(chain);
      MixingOptions opts;
      opts.path = parse_update_path(path);
      opts.eps = eps;
      if (mix_start == "empty") {
        opts.start = StartKind::empty;
      } else if (mix_start != "post-scan") {
        throw DomainError("mix --start must be empty or post-scan");
      }
      const auto T = horizon ? *horizon : default_horizon(spec, g.num_vertices(), eps);
      out << estimate_tv(m, g, spec, T, ensemble, seed, opts).to_json() << '\n';
      return 0;
    }
    if (*verify) {
      std::vector<CriterionResult> results;
      if (suite == "oracle") {
        results = run_oracle_suite(seed);
      } else {
        AcceptanceConfig cfg;
        cfg.seed = seed;
        cfg.only = criteria;
        cfg.timings = timings;
        results = run_acceptance_suite(cfg).results;
      }
      bool ok = true;
      for (const auto& r : results) {
        out << (json ? r.to_json(timings) : r.line(timings)) << '\n';
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
    if (*conc) {
      const Graph g = graph.load();
      const Model m = model.build(g);
      ConcentrationOptions opts;
      opts.burn_rounds = burn;
      opts.thin = thin;
      opts.path = parse_update_path(path);
      const auto rep = concentration_experiment(m, g, function, samples, seed, opts);
      out << (format == "csv" ? rep.to_csv() : rep.to_json() + "\n");
      return 0;
    }
    if (*bench) {
      if (!betas.empty() && betas.size() != 1 && betas.size() != degrees.size()) {
        throw DomainError("--beta takes one value or one per degree");
      }
      std::vector<CostRow> rows;
      for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double d = static_cast<double>(degrees[i]);
        const double b = betas.empty() ? d / (d + 1) : betas[betas.size() == 1 ? 0 : i];
        FactoryCaps caps;
        caps.alpha = alpha;
        auto r = factory_cost_profile({{bench_lambda, b}}, {degrees[i]}, trials, derive_seed(seed, i), caps);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      out << cost_rows_to_json(rows) << '\n';
      return 0;
    }
    if (*thr) {
      const Graph g = star_graph(static_cast<std::size_t>(std::max(max_degree, 1)));
      const Model m = model.build(g);
      out << to_json(classify_uniqueness(m, max_degree, delta, model.given())) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace spinchain::cli
