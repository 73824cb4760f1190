#include "perclab/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "perclab/branching.hpp"
#include "perclab/error.hpp"
#include "perclab/exact_enum.hpp"

namespace perclab {

namespace fs = std::filesystem;

namespace {

double parse_probability(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return static_cast<double>(parse_rational(v.get<std::string>()));
  fail(ErrorKind::invalid_argument, "expected a number or a fraction string");
}

std::vector<double> parse_p_values(const nlohmann::json& v) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(parse_probability(x));
  } else if (v.is_object()) {
    const double start = parse_probability(v.at("start"));
    const double stop = parse_probability(v.at("stop"));
    const auto count = v.at("count").get<int>();
    require(count >= 1, "range count must be >= 1");
    for (int i = 0; i < count; ++i)
      out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  } else {
    out.push_back(parse_probability(v));
  }
  return out;
}

template <typename F>
void field(std::vector<std::string>& errors, const std::string& name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    errors.push_back(name + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  std::vector<std::string> errors;
  if (!j.is_object()) fail(ErrorKind::invalid_argument, "config: must be a JSON object");
  c.source = j;
  static const std::vector<std::string> known = {"name", "graph", "sampler", "p", "seed", "seeds",
                                                 "n_samples", "size_cap", "batches", "analyses",
                                                 "workers", "out_dir"};
  for (const auto& [k, _] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) errors.push_back(k + ": unknown field");
  }
  field(errors, "name", [&] { c.name = j.value("name", std::string("experiment")); });
  field(errors, "graph", [&] {
    require(j.contains("graph"), "required");
    c.graph = j.at("graph").get<FamilyDescriptor>();
  });
  field(errors, "sampler", [&] {
    const auto s = j.value("sampler", std::string("direct"));
    require(s == "direct" || s == "compositional", "must be \"direct\" or \"compositional\"");
    c.sampler = s == "direct" ? Sampler::direct : Sampler::compositional;
  });
  std::vector<double> ps;
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t n_samples = 0;
  std::size_t size_cap = kDefaultSizeCap;
  field(errors, "p", [&] {
    if (j.contains("p")) ps = parse_p_values(j.at("p"));
  });
  field(errors, "seeds", [&] {
    if (j.contains("seeds")) seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("seed")) seeds = {j.at("seed").get<std::uint64_t>()};
    require(!seeds.empty(), "must not be empty");
  });
  field(errors, "n_samples", [&] {
    if (j.contains("n_samples")) {
      n_samples = j.at("n_samples").get<std::uint64_t>();
      require(n_samples >= 1, "must be >= 1");
    }
  });
  field(errors, "size_cap", [&] {
    if (j.contains("size_cap")) {
      size_cap = j.at("size_cap").get<std::size_t>();
      require(size_cap >= 1, "must be >= 1");
    }
  });
  if (j.contains("batches")) {
    field(errors, "batches", [&] { require(j.at("batches").is_array(), "must be an array"); });
    if (j.at("batches").is_array()) {
      std::size_t i = 0;
      for (const auto& b : j.at("batches")) {
        const auto where = "batches[" + std::to_string(i++) + "]";
        field(errors, where, [&] {
          BatchRequest r;
          r.p = parse_probability(b.at("p"));
          r.seed = b.contains("seed") ? b.at("seed").get<std::uint64_t>() : seeds.front();
          r.n_samples = b.contains("n_samples") ? b.at("n_samples").get<std::uint64_t>() : n_samples;
          r.size_cap = b.contains("size_cap") ? b.at("size_cap").get<std::size_t>() : size_cap;
          c.batches.push_back(r);
        });
      }
    }
  } else {
    for (double p : ps)
      for (auto s : seeds) c.batches.push_back({p, s, n_samples, size_cap});
  }
  if (c.batches.empty() && !j.contains("batches")) errors.push_back("p: at least one p value is required");
  for (std::size_t i = 0; i < c.batches.size(); ++i) {
    const auto& b = c.batches[i];
    const auto where = j.contains("batches") ? "batches[" + std::to_string(i) + "]" : std::string("p");
    if (!(b.p >= 0.0 && b.p <= 1.0)) errors.push_back(where + ": p must lie in [0, 1]");
    if (b.n_samples < 1) errors.push_back(where + ": n_samples must be >= 1");
    if (b.size_cap < 1) errors.push_back(where + ": size_cap must be >= 1");
  }
  if (j.contains("analyses")) {
    const auto& a = j.at("analyses");
    field(errors, "analyses.tail", [&] { c.tail = a.value("tail", true); });
    field(errors, "analyses.compare", [&] { c.compare_models = a.value("compare", false); });
    if (a.contains("fits")) {
      std::size_t i = 0;
      for (const auto& f : a.at("fits")) {
        field(errors, "analyses.fits[" + std::to_string(i++) + "]", [&] {
          FitRequest r;
          r.model_text = f.at("model").get<std::string>();
          r.model = parse_model(r.model_text);
          if (f.contains("window")) {
            r.window_text = f.at("window").get<std::string>();
            r.window = parse_window(r.window_text);
          }
          c.fits.push_back(r);
        });
      }
    }
  }
  field(errors, "workers", [&] { c.workers = j.value("workers", 0u); });
  field(errors, "out_dir", [&] {
    c.out_dir = j.value("out_dir", std::string("out"));
    require(!c.out_dir.empty(), "must not be empty");
  });
  if (errors.empty() && c.sampler == Sampler::compositional) {
    if (c.graph.family != Family::planted || !c.graph.is_implicit())
      errors.push_back("sampler: compositional sampling needs an implicit planted graph");
  }
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    fail(ErrorKind::invalid_argument, msg);
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, "config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::json preset_config(const std::string& name) {
  if (name == "one_regime_d2_r3") {
    return nlohmann::json::parse(R"({
      "name": "one_regime_d2_r3",
      "graph": {"family": "planted", "d": 2, "r": 3},
      "seed": 20240601,
      "batches": [
        {"p": 0.2, "n_samples": 1000000, "size_cap": 10000},
        {"p": "1/3", "n_samples": 10000000, "size_cap": 100000},
        {"p": 0.45, "n_samples": 1000000, "size_cap": 10000}
      ],
      "analyses": {
        "tail": true,
        "compare": true,
        "fits": [{"model": "exp"}, {"model": "power"}, {"model": "power", "window": "100:10000"}]
      },
      "out_dir": "out/one_regime_d2_r3"
    })");
  }
  fail(ErrorKind::invalid_argument, "unknown preset '" + name + "' (available: one_regime_d2_r3)");
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

std::string histogram_hash(const SizeHistogram& h) { return git_blob_sha1(h.content_json().dump()); }

std::vector<SizeHistogram> read_histograms(const fs::path& jsonl) {
  std::ifstream in(jsonl);
  require(in.good(), "cannot open " + jsonl.string());
  std::vector<SizeHistogram> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(SizeHistogram::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const auto hist_path = dir / "histograms.jsonl";
  {
    std::ofstream probe(hist_path, std::ios::trunc);
    if (!probe.good()) fail(ErrorKind::invalid_argument, "out_dir: cannot write to " + dir.string());
  }
  RunResult result;
  nlohmann::json records = nlohmann::json::array();
  for (const auto& b : config.batches) {
    SampleSpec spec;
    spec.graph = config.graph;
    spec.p = b.p;
    spec.seed = b.seed;
    spec.n_samples = b.n_samples;
    spec.size_cap = b.size_cap;
    spec.sampler = config.sampler;
    try {
      const auto h = run_batch(spec, config.workers);
      std::ofstream out(hist_path, std::ios::app);
      out << h.record_json().dump() << '\n';
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "batch p=" << b.p << " seed=" << b.seed << ": " << e.what();
      result.failures.push_back(msg.str());
    }
  }

  // Analyses see only what was persisted.
  const auto persisted = read_histograms(hist_path);
  std::ofstream fits(dir / "fits.csv");
  write_fits_csv_header(fits);
  nlohmann::json verdicts = nlohmann::json::array();
  for (std::size_t k = 0; k < persisted.size(); ++k) {
    const auto& h = persisted[k];
    std::ostringstream id;
    id << "batch" << k << "_p" << h.spec.p << "_seed" << h.spec.seed;
    nlohmann::json rec{{"spec", h.spec},
                       {"hash", histogram_hash(h)},
                       {"wall_time", h.wall_time},
                       {"censored_frontier", h.censored_frontier},
                       {"censored_cap", h.censored_cap}};
    const auto curve = tail_from_histogram(h, id.str());
    if (config.tail) {
      const auto name = "tail_" + std::to_string(k) + ".csv";
      std::ofstream t(dir / name);
      write_tail_csv(t, curve);
      rec["tail_csv"] = name;
    }
    for (const auto& f : config.fits) {
      try {
        write_fit_csv_row(fits, fit_model(curve, f.model, f.window));
      } catch (const std::exception& e) {
        result.failures.push_back(id.str() + " fit " + f.model_text + ": " + e.what());
      }
    }
    if (config.compare_models && config.fits.size() >= 2) {
      std::vector<ModelSpec> models;
      for (const auto& f : config.fits)
        if (f.window_text.empty()) models.push_back(f.model);
      try {
        if (models.size() >= 2) {
          const auto cmp = model_compare(curve, models);
          verdicts.push_back({{"curve", id.str()}, {"verdict", cmp.verdict}, {"delta_r2", cmp.delta_r2}});
        }
      } catch (const std::exception& e) {
        result.failures.push_back(id.str() + " compare: " + e.what());
      }
    }
    records.push_back(std::move(rec));
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.manifest = nlohmann::json{{"tool", "perclab"},
                                   {"name", config.name},
                                   {"config", config.source},
                                   {"histograms", "histograms.jsonl"},
                                   {"fits_csv", "fits.csv"},
                                   {"records", records},
                                   {"verdicts", verdicts},
                                   {"failures", result.failures},
                                   {"wall_time_total", total}};
  result.manifest_path = dir / "manifest.json";
  std::ofstream m(result.manifest_path);
  m << result.manifest.dump(2) << '\n';
  return result;
}

ReplayResult replay_manifest(const fs::path& manifest, const std::string& out_dir) {
  std::ifstream in(manifest);
  require(in.good(), "cannot open manifest " + manifest.string());
  const auto m = nlohmann::json::parse(in);
  auto source = m.at("config");
  source["out_dir"] = out_dir;
  const auto config = parse_config(source);
  ReplayResult r;
  r.run = run_experiment(config);
  const auto& before = m.at("records");
  const auto& after = r.run.manifest.at("records");
  if (before.size() != after.size()) {
    r.mismatches.push_back("record count " + std::to_string(before.size()) + " vs " +
                           std::to_string(after.size()));
  }
  for (std::size_t i = 0; i < std::min(before.size(), after.size()); ++i) {
    if (before[i].at("hash") != after[i].at("hash")) {
      r.mismatches.push_back("record " + std::to_string(i) + ": " + before[i].at("hash").get<std::string>() +
                             " vs " + after[i].at("hash").get<std::string>());
    }
  }
  r.identical = r.mismatches.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Oracle suite

namespace {

template <typename F>
OracleRow timed(const std::string& name, F&& f) {
  OracleRow row;
  row.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    f(row);
  } catch (const std::exception& e) {
    row.passed = false;
    row.detail = std::string("error: ") + e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

// Cluster-size law of the origin by enumerating all 2^|E| configurations.
std::vector<Rational> configuration_law(const Graph& g, const Rational& p) {
  const auto m = g.num_edges();
  const auto n = g.num_vertices();
  std::vector<Rational> law(n, 0);
  std::vector<Rational> pk(m + 1), qk(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    pk[k] = rational_pow(p, k);
    qk[k] = rational_pow(1 - p, k);
  }
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::uint32_t> stack{g.origin_index()};
    seen[g.origin_index()] = 1;
    std::size_t size = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      const auto nb = g.adjacent(v);
      const auto inc = g.incident_edges(v);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (((mask >> inc[i]) & 1) && !seen[nb[i]]) {
          seen[nb[i]] = 1;
          ++size;
          stack.push_back(nb[i]);
        }
      }
    }
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    law[size - 1] += pk[k] * qk[m - k];
  }
  return law;
}

}  // namespace

std::vector<OracleRow> oracle_suite(const OracleOptions& opts) {
  std::vector<OracleRow> rows;

  rows.push_back(timed("dwass == recursive (4 laws, n <= 50)", [&](OracleRow& row) {
    const std::vector<OffspringDist> laws = {OffspringDist::binomial(2, 0.3), OffspringDist::binomial(3, 0.2),
                                             OffspringDist::binomial(2, 0.7),
                                             OffspringDist::generic({0.3, 0.2, 0.1, 0.4})};
    double worst = 0.0;
    std::string where;
    for (const auto& law : laws) {
      auto a = total_progeny_pmf_dwass(law, 50);
      if (opts.corrupt_dwass) a.values[6] *= 1.0 + 1e-9;
      const auto b = total_progeny_pmf_recursive(law, 50);
      for (std::size_t n = 1; n <= 50; ++n) {
        const double diff = std::fabs(a.at(n) - b.at(n));
        if (diff > worst) {
          worst = diff;
          where = law.describe() + " n=" + std::to_string(n);
        }
      }
    }
    row.passed = worst <= 1e-12;
    row.detail = "max |diff| = " + fmt(worst) + (row.passed ? "" : " at " + where);
  }));

  rows.push_back(timed("dwass (double) == dwass (rational), Binomial(2,3/10), n <= 60", [&](OracleRow& row) {
    const auto exact = total_progeny_pmf_dwass_exact(2, Rational(3, 10), 60);
    const auto approx = total_progeny_pmf_dwass(OffspringDist::binomial(2, 0.3), 60);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 60; ++n)
      worst = std::max(worst, std::fabs(exact.at(n) - approx.at(n)) / exact.at(n));
    row.passed = worst <= 1e-12;
    row.detail = "max relative diff = " + fmt(worst);
  }));

  rows.push_back(timed("exact enumeration == dwass on binary tree (exact, n <= 6)", [&](OracleRow& row) {
    const auto tree = build_rooted_tree(2, 7);
    const auto enumerated = exact_cluster_pmf(tree, Rational(3, 10), 6);
    const auto dwass = total_progeny_pmf_dwass_exact(2, Rational(3, 10), 6);
    bool same = true;
    for (std::size_t n = 0; n < 6; ++n) same = same && enumerated.exact_values[n] == dwass.exact_values[n];
    row.passed = same;
    row.detail = same ? "identical rationals" : "rational mismatch";
  }));

  rows.push_back(timed("exact enumeration == 2^12 configurations on a 3x3 grid", [&](OracleRow& row) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t r = 0; r < 3; ++r)
      for (std::uint32_t c = 0; c < 3; ++c) {
        if (c + 1 < 3) edges.push_back({3 * r + c, 3 * r + c + 1});
        if (r + 1 < 3) edges.push_back({3 * r + c, 3 * (r + 1) + c});
      }
    const auto g = Graph::from_edges(9, edges, 4);
    const Rational p(3, 10);
    const auto enumerated = exact_cluster_pmf(g, p, 9);
    const auto law = configuration_law(g, p);
    bool same = true;
    for (std::size_t n = 0; n < 9; ++n) same = same && enumerated.exact_values[n] == law[n];
    row.passed = same;
    row.detail = same ? "identical rationals" : "rational mismatch";
  }));

  rows.push_back(timed("duality q * dual(n) == pmf(n), Binomial(2,0.7), n <= 40", [&](OracleRow& row) {
    const auto law = OffspringDist::binomial(2, 0.7);
    const double q = law.extinction_probability();
    const auto a = total_progeny_pmf_dwass(law, 40);
    const auto b = total_progeny_pmf_dwass(dual_offspring(law), 40);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 40; ++n) worst = std::max(worst, std::fabs(q * b.at(n) - a.at(n)));
    row.passed = worst <= 1e-12 && std::fabs(q - 9.0 / 49.0) <= 1e-12;
    row.detail = "q = " + fmt(q) + ", max |diff| = " + fmt(worst);
  }));

  rows.push_back(timed("ray+tree convolution == exact enumeration (n <= 6)", [&](OracleRow& row) {
    const auto g = build_ray_plus_tree(RayTreeExtent{8, 7});
    const auto enumerated = exact_cluster_pmf(g, 0.3, 6);
    const auto conv = ray_tree_cluster_pmf(0.3, 6);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 6; ++n) worst = std::max(worst, std::fabs(enumerated.at(n) - conv.at(n)));
    row.passed = worst <= 1e-12;
    row.detail = "max |diff| = " + fmt(worst);
  }));

  rows.push_back(timed("monte carlo == dwass, binary tree p=0.3 (2e5 samples, 4 SE, n <= 8)", [&](OracleRow& row) {
    SampleSpec spec;
    spec.graph.family = Family::rooted_tree;
    spec.graph.r = 2;
    spec.p = 0.3;
    spec.seed = 11;
    spec.n_samples = 200'000;
    spec.size_cap = 100'000;
    const auto h = run_batch(spec, opts.workers);
    const auto exact = total_progeny_pmf_dwass(OffspringDist::binomial(2, 0.3), 8);
    double worst = 0.0;
    const double N = static_cast<double>(h.n_samples);
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto it = h.counts.find(n);
      const double freq = it == h.counts.end() ? 0.0 : static_cast<double>(it->second) / N;
      const double se = std::sqrt(exact.at(n) * (1.0 - exact.at(n)) / N);
      worst = std::max(worst, std::fabs(freq - exact.at(n)) / se);
    }
    row.passed = worst <= 4.0;
    row.detail = "max |z| = " + fmt(worst);
  }));

  return rows;
}

}  // namespace perclab
