#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "perclab/analysis.hpp"
#include "perclab/branching.hpp"
#include "perclab/cayley.hpp"
#include "perclab/error.hpp"
#include "perclab/exact_enum.hpp"
#include "perclab/experiment.hpp"
#include "perclab/graph.hpp"
#include "perclab/isoperimetry.hpp"
#include "perclab/percolation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perclab;

namespace {

enum Exit { ok = 0, validation = 1, runtime = 2, oracle_failure = 3 };

// Inline JSON, or @path to read it from a file.
json read_json_arg(const std::string& text) {
  try {
    if (!text.empty() && text[0] == '@') {
      std::ifstream in(text.substr(1));
      require(in.good(), "cannot open " + text.substr(1));
      return json::parse(in);
    }
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("bad JSON: ") + e.what());
  }
}

FamilyDescriptor read_graph(const std::string& text) { return read_json_arg(text).get<FamilyDescriptor>(); }

double read_p(const std::string& text) {
  const double p = parse_rational(text).convert_to<double>();
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1], got " + text);
  return p;
}

// Writes to --out if given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
      file_.open(path);
      require(file_.good(), "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

TailCurve read_tail_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  std::string line;
  std::getline(in, line);
  require(line.rfind("n,tail", 0) == 0, path + ": expected header n,tail,se");
  TailCurve curve;
  curve.id = fs::path(path).stem().string();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string n, tail, se;
    std::getline(row, n, ',');
    std::getline(row, tail, ',');
    std::getline(row, se, ',');
    curve.points.push_back({std::stoull(n), std::stod(tail), se.empty() ? 0.0 : std::stod(se)});
  }
  return curve;
}

ElementSet read_elements(const Group& group, const std::string& text) {
  ElementSet set = read_json_arg(text).get<ElementSet>();
  for (const auto& a : set) group.validate(a);
  normalize(set);
  return set;
}

Group read_group(const std::string& name) {
  if (name == "lamplighter") return Group::lamplighter();
  if (name.rfind("z", 0) == 0) {
    const int d = std::stoi(name.substr(name.find_first_of("0123456789")));
    return Group::zd(d);
  }
  fail(ErrorKind::invalid_argument, "group must be zD (e.g. z2) or lamplighter, got " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perclab: percolation cluster-size experiments"};
  app.require_subcommand(1);

  // generate
  std::string graph_text = R"({"family":"grid","d":2,"radius":5})";
  std::string out_path;
  bool list_vertices = false;
  auto* generate = app.add_subcommand("generate", "Build a graph and print a summary");
  generate->add_option("--graph", graph_text, "Graph descriptor JSON or @file");
  generate->add_option("--out", out_path, "Output file (default stdout)");
  generate->add_flag("--vertices", list_vertices, "Include vertex keys and edges");

  // sample
  std::vector<std::string> p_texts;
  std::uint64_t seed = 1;
  std::uint64_t n_samples = 1000;
  std::size_t size_cap = kDefaultSizeCap;
  std::string sampler_text = "direct";
  unsigned workers = 0;
  auto* sample = app.add_subcommand("sample", "Monte Carlo cluster sizes, one JSONL histogram per p");
  sample->add_option("--graph", graph_text, "Graph descriptor JSON or @file");
  sample->add_option("--p", p_texts, "Edge probability (repeatable; fractions allowed)")->required();
  sample->add_option("--seed", seed, "Master seed");
  sample->add_option("--samples", n_samples, "Samples per p");
  sample->add_option("--size-cap", size_cap, "Censor clusters beyond this size");
  sample->add_option("--sampler", sampler_text, "direct or compositional")
      ->check(CLI::IsMember({"direct", "compositional"}));
  sample->add_option("--workers", workers, "Worker threads (0: all cores)");
  sample->add_option("--out", out_path, "Output JSONL (default stdout)");

  // exact
  std::size_t n_max = 10;
  auto* exact = app.add_subcommand("exact", "Exact cluster-size pmf by animal enumeration");
  exact->add_option("--graph", graph_text, "Finite graph descriptor JSON or @file");
  exact->add_option("--p", p_texts, "Edge probability (exact rational)")->required();
  exact->add_option("--n-max", n_max, "Largest cluster size");
  exact->add_option("--out", out_path, "Output CSV (default stdout)");

  // gw
  std::string offspring_text = "binomial:2,0.3";
  std::string method = "dwass";
  auto* gw = app.add_subcommand("gw", "Total-progeny pmf of a Galton-Watson process");
  gw->add_option("--offspring", offspring_text, "binomial:R,P or generic:P0,P1,...");
  gw->add_option("--n-max", n_max, "Largest total progeny");
  gw->add_option("--method", method, "dwass, exact, recursive or dual")
      ->check(CLI::IsMember({"dwass", "exact", "recursive", "dual"}));
  gw->add_option("--out", out_path, "Output CSV (default stdout)");

  // fit
  std::vector<std::string> inputs;
  std::vector<std::string> models;
  std::string window_text;
  bool compare = false;
  auto* fit = app.add_subcommand("fit", "Fit tail models to histograms (JSONL) or tail CSVs");
  fit->add_option("inputs", inputs, "histograms.jsonl or tail CSV files")->required();
  fit->add_option("--model", models, "exp, power, stretched or stretched:THETA (repeatable)");
  fit->add_option("--window", window_text, "Fit window LO:HI");
  fit->add_flag("--compare", compare, "Rank the models by R^2");
  fit->add_option("--out", out_path, "Output CSV (default stdout)");

  // cheeger
  std::size_t max_size = 6;
  std::string anchor_text;
  bool unanchored = false;
  auto* cheeger = app.add_subcommand("cheeger", "Brute-force (anchored) Cheeger ratio");
  cheeger->add_option("--graph", graph_text, "Finite graph descriptor JSON or @file");
  cheeger->add_option("--max-size", max_size, "Largest set size");
  cheeger->add_option("--anchor", anchor_text, "Anchor vertex key (default: origin)");
  cheeger->add_flag("--unanchored", unanchored, "Minimize over all connected sets");
  cheeger->add_option("--out", out_path, "Output JSON (default stdout)");

  // folner
  int n_lo = 2, n_hi = 6;
  bool with_sets = false;
  auto* folner = app.add_subcommand("folner", "Lamplighter Folner sets and their boundary ratios");
  folner->add_option("--from", n_lo, "First n");
  folner->add_option("--to", n_hi, "Last n");
  folner->add_flag("--sets", with_sets, "Include W_n and its boundary");
  folner->add_option("--out", out_path, "Output JSON (default stdout)");

  // translate
  std::string group_text = "z2";
  std::int64_t radius = 30;
  std::string a_text, b_text;
  bool minimize = false;
  auto* translate = app.add_subcommand("translate", "Find a disjoint nearby right translate of A");
  translate->add_option("--group", group_text, "z<d> or lamplighter");
  translate->add_option("--radius", radius, "Ambient ball radius");
  translate->add_option("--a", a_text, "Set A: JSON array of coordinate arrays, or @file")->required();
  translate->add_option("--b", b_text, "Set B (default: A)");
  translate->add_flag("--min", minimize, "Also report the minimum achievable distance");
  translate->add_option("--out", out_path, "Output JSON (default stdout)");

  // oracle-suite
  std::string inject;
  auto* oracle = app.add_subcommand("oracle-suite", "Cross-check independent routes to the same laws");
  oracle->add_option("--inject-fault", inject)->group("")->check(CLI::IsMember({"dwass"}));
  oracle->add_option("--workers", workers, "Worker threads (0: all cores)");

  // run
  std::string config_path, preset, replay;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment config end to end");
  run->add_option("--config", config_path, "Experiment config JSON");
  run->add_option("--preset", preset, "Named preset (one_regime_d2_r3)");
  run->add_option("--replay", replay, "Manifest to re-run and compare");
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--samples", n_samples, "Samples per batch (overrides the config)");
  run->add_option("--size-cap", size_cap, "Size cap (overrides the config)");
  run->add_option("--p", p_texts, "Edge probabilities (override the config; repeatable)");
  run->add_option("--workers", workers, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return validation;
  }

  try {
    if (*generate) {
      const auto desc = read_graph(graph_text);
      const auto g = build_graph(desc);
      json j;
      j["graph"] = desc;
      j["explicit"] = g.is_explicit();
      j["origin"] = to_string(g.origin());
      if (g.is_explicit()) {
        std::size_t frontier = 0;
        for (std::uint32_t v = 0; v < g.num_vertices(); ++v) frontier += g.is_frontier(v);
        j["vertices"] = g.num_vertices();
        j["edges"] = g.num_edges();
        j["frontier"] = frontier;
        if (list_vertices) {
          json keys = json::array(), edges = json::array();
          for (std::uint32_t v = 0; v < g.num_vertices(); ++v) keys.push_back(to_string(g.key(v)));
          for (std::uint32_t e = 0; e < g.num_edges(); ++e) edges.push_back({g.edge(e).u, g.edge(e).v});
          j["vertex_keys"] = keys;
          j["edge_list"] = edges;
        }
      }
      Output out(out_path);
      out.stream() << j.dump(2) << '\n';
      return ok;
    }

    if (*sample) {
      SampleSpec spec;
      spec.graph = read_graph(graph_text);
      spec.seed = seed;
      spec.n_samples = n_samples;
      spec.size_cap = size_cap;
      spec.sampler = sampler_text == "compositional" ? Sampler::compositional : Sampler::direct;
      std::vector<double> ps;
      for (const auto& t : p_texts) ps.push_back(read_p(t));
      Output out(out_path);
      for (double p : ps) {
        spec.p = p;
        spec.validate();
        const auto h = run_batch(spec, workers);
        out.stream() << h.record_json().dump() << '\n';
        std::cerr << "p=" << p << " finite=" << h.finite_count() << " censored=" << h.censored()
                  << " hash=" << histogram_hash(h) << " wall=" << h.wall_time << "s\n";
      }
      return ok;
    }

    if (*exact) {
      require(p_texts.size() == 1, "exact takes a single --p");
      const auto g = build_graph(read_graph(graph_text));
      require(g.is_explicit(), "exact enumeration needs a finite graph (give radius/depth)");
      const auto pmf = exact_cluster_pmf(g, parse_rational(p_texts[0]), n_max);
      Output out(out_path);
      write_pmf_csv(out.stream(), pmf);
      return ok;
    }

    if (*gw) {
      const auto law = parse_offspring(offspring_text);
      Pmf pmf;
      if (method == "dwass") {
        pmf = total_progeny_pmf_dwass(law, n_max);
      } else if (method == "recursive") {
        pmf = total_progeny_pmf_recursive(law, n_max);
      } else if (method == "dual") {
        pmf = total_progeny_pmf_dwass(dual_offspring(law), n_max);
      } else {
        require(law.is_binomial(), "--method exact needs a binomial law");
        const auto body = offspring_text.substr(offspring_text.find(',') + 1);
        pmf = total_progeny_pmf_dwass_exact(law.r(), parse_rational(body), n_max);
      }
      Output out(out_path);
      write_pmf_csv(out.stream(), pmf);
      std::cerr << law.describe() << " mean=" << law.mean() << " q=" << law.extinction_probability()
                << " residual=" << pmf.residual << " infinite=" << pmf.infinite_mass << '\n';
      return ok;
    }

    if (*fit) {
      std::vector<TailCurve> curves;
      for (const auto& path : inputs) {
        if (fs::path(path).extension() == ".csv") {
          curves.push_back(read_tail_csv(path));
        } else {
          std::size_t k = 0;
          for (const auto& h : read_histograms(path)) {
            curves.push_back(tail_from_histogram(h, fs::path(path).stem().string() + "_" + std::to_string(k++)));
          }
        }
      }
      if (models.empty()) models = {"exp", "power"};
      std::vector<ModelSpec> specs;
      for (const auto& m : models) specs.push_back(parse_model(m));
      const FitWindow window = window_text.empty() ? FitWindow{} : parse_window(window_text);
      Output out(out_path);
      write_fits_csv_header(out.stream());
      for (const auto& c : curves) {
        for (const auto& s : specs) write_fit_csv_row(out.stream(), fit_model(c, s, window));
        if (compare) std::cerr << c.id << ": " << model_compare(c, specs, window).verdict << '\n';
      }
      return ok;
    }

    if (*cheeger) {
      const auto g = build_graph(read_graph(graph_text));
      std::optional<VertexKey> anchor;
      if (!unanchored) anchor = anchor_text.empty() ? g.origin() : parse_vertex_key(anchor_text);
      const auto res = cheeger_bruteforce(g, max_size, anchor);
      json j;
      j["boundary"] = res.boundary;
      j["size"] = res.size;
      j["ratio"] = res.ratio();
      j["sets_examined"] = res.sets_examined;
      json w = json::array();
      for (const auto& k : res.witness) w.push_back(to_string(k));
      j["witness"] = w;
      Output out(out_path);
      out.stream() << j.dump(2) << '\n';
      return ok;
    }

    if (*folner) {
      require(n_lo >= 2 && n_hi >= n_lo, "need 2 <= --from <= --to");
      json rows = json::array();
      for (int n = n_lo; n <= n_hi; ++n) {
        const auto f = lamplighter_folner(n);
        json row{{"n", n},          {"box_size", f.box_size}, {"size", f.w.size()},
                 {"boundary", f.boundary.size()}, {"ratio", f.ratio},
                 {"required_radius", f.required_radius},
                 {"boundary_2_closure_connected", check_kclosure_connected(build_graph(Group::lamplighter().descriptor(std::nullopt)), f.boundary, 2)}};
        if (with_sets) {
          json w = json::array(), b = json::array();
          for (const auto& k : f.w) w.push_back(to_string(k));
          for (const auto& k : f.boundary) b.push_back(to_string(k));
          row["w"] = w;
          row["boundary_set"] = b;
        }
        rows.push_back(row);
      }
      Output out(out_path);
      out.stream() << rows.dump(2) << '\n';
      return ok;
    }

    if (*translate) {
      const auto group = read_group(group_text);
      const CayleyBall ball(group, radius);
      const auto a = read_elements(group, a_text);
      const auto b = b_text.empty() ? a : read_elements(group, b_text);
      const auto res = find_disjoint_translate(ball, a, b);
      json j{{"gamma", res.gamma}, {"distance", res.distance}, {"bound", res.bound},
             {"candidates", res.candidates}, {"size_a", a.size()}, {"size_b", b.size()}};
      if (minimize) j["min_distance"] = min_translate_distance(ball, a, b).distance;
      Output out(out_path);
      out.stream() << j.dump(2) << '\n';
      return ok;
    }

    if (*oracle) {
      OracleOptions opts;
      opts.corrupt_dwass = inject == "dwass";
      opts.workers = workers;
      const auto rows = oracle_suite(opts);
      bool all = true;
      std::size_t width = 0;
      for (const auto& r : rows) width = std::max(width, r.name.size());
      for (const auto& r : rows) {
        all = all && r.passed;
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name
                  << "  " << std::right << std::fixed << std::setprecision(2) << std::setw(7) << r.seconds << "s  " << r.detail
                  << '\n';
      }
      return all ? ok : oracle_failure;
    }

    if (*run) {
      if (!replay.empty()) {
        require(config_path.empty() && preset.empty(), "--replay excludes --config and --preset");
        const auto dir = out_dir.empty() ? (fs::path(replay).parent_path() / "replay").string() : out_dir;
        const auto res = replay_manifest(replay, dir);
        for (const auto& m : res.mismatches) std::cerr << "mismatch: " << m << '\n';
        std::cout << (res.identical ? "replay identical" : "replay differs") << " (" << dir << ")\n";
        return res.identical ? ok : runtime;
      }
      require(config_path.empty() != preset.empty(), "give exactly one of --config, --preset, --replay");
      json j;
      if (!preset.empty()) {
        j = preset_config(preset);
      } else {
        std::ifstream in(config_path);
        require(in.good(), "cannot open " + config_path);
        try {
          j = json::parse(in);
        } catch (const json::exception& e) {
          fail(ErrorKind::invalid_argument, config_path + ": " + e.what());
        }
      }
      if (!out_dir.empty()) j["out_dir"] = out_dir;
      if (run->count("--seed")) j["seed"] = seed;
      if (run->count("--samples")) j["n_samples"] = n_samples;
      if (run->count("--size-cap")) j["size_cap"] = size_cap;
      if (run->count("--workers")) j["workers"] = workers;
      if (!p_texts.empty()) {
        j["p"] = p_texts;
        j.erase("batches");
      }
      const auto config = parse_config(j);
      const auto res = run_experiment(config);
      for (const auto& f : res.failures) std::cerr << "failure: " << f << '\n';
      for (const auto& v : res.manifest.value("verdicts", json::array())) std::cout << v.dump() << '\n';
      std::cout << "manifest " << res.manifest_path.string() << '\n';
      return res.failures.empty() ? ok : runtime;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::invalid_argument ? validation : runtime;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return runtime;
  }
  return ok;
}
