#include "ibprof/cli/commands.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <thread>

#include "ibprof/cli/io.hpp"
#include "ibprof/cli/report.hpp"
#include "ibprof/error.hpp"
#include "ibprof/ibprof.hpp"

#ifndef IBPROF_VERSION
#define IBPROF_VERSION "0.0.0"
#endif

namespace ibprof::cli {

namespace {

struct Globals {
  std::string out;
  bool stamp_now = false;
};

struct Loaded {
  Graph graph;
  LabeledPartition partition;
  std::vector<InputFile> inputs;
};

double real_arg(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("{}: '{}' is not a number", key, v));
  }
  return d;
}

std::uint64_t uint_arg(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const auto d = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v.front() == '-' || end != v.c_str() + v.size()) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("{}: '{}' is not a nonnegative integer", key, v));
  }
  return d;
}

Json label_map(const std::vector<std::string>& names) {
  Json arr = Json::array();
  for (std::size_t b = 0; b < names.size(); ++b) arr.push_back(Json{{"block", b}, {"label", names[b]}});
  return arr;
}

Json masses_json(const Stratification& s) {
  Json arr = Json::array();
  for (Stratum t : s.strata()) {
    const auto i = static_cast<std::size_t>(t);
    arr.push_back(Json{{"stratum", std::string(stratum_name(t, s.directed))},
                       {"mass", s.edge_mass[i]},
                       {"arc_mass", s.mass[i]},
                       {"edges", s.edge_count[i]}});
  }
  return arr;
}

Json dominance_json(const std::vector<GroupDominance>& dom) {
  Json arr = Json::array();
  for (const auto& d : dom) {
    arr.push_back(Json{{"block", d.block},
                       {"skipped", d.skipped == DominanceSkip::None ? Json(nullptr) : Json(std::string(to_string(d.skipped)))},
                       {"mean_boundary", real_or_null(d.mean_boundary)},
                       {"mean_interior", real_or_null(d.mean_interior)},
                       {"gap", real_or_null(d.gap)},
                       {"dominant", d.dominant}});
  }
  return arr;
}

bool any_undefined(const AssortProfile& p) {
  return std::any_of(p.entries.begin(), p.entries.end(), [](const ProfileEntry& e) {
    return e.count > 0 && !e.rho.has_value();
  });
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Interior-boundary assortativity profiles, spectral diagnostics and SIS equilibria", "ibprof"};
    app.require_subcommand(1);
    app.set_version_flag("--version", IBPROF_VERSION);
    app.add_option("--out", g_.out, "Write the JSON report here instead of stdout");
    app.add_flag("--stamp-now", g_.stamp_now, "Use the wall clock as report timestamp");

    add_profile(app);
    add_collapse(app);
    add_signcheck(app);
    add_spectral(app);
    add_proxy(app);
    add_sis(app);
    add_chain(app);
    add_gen(app);
    add_sweep(app);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitError;
    }
    try {
      return action_();
    } catch (const Error& e) {
      err_ << "ibprof: error [" << to_string(e.code()) << "]: " << e.what() << "\n";
      return kExitError;
    } catch (const std::exception& e) {
      err_ << "ibprof: error: " << e.what() << "\n";
      return kExitError;
    }
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  Globals g_;
  std::function<int()> action_;

  std::string graph_path_, partition_path_, attribute_path_, categorical_path_;

  void add_graph(CLI::App* sub) {
    sub->add_option("--graph", graph_path_, "Edge list")->required()->check(CLI::ExistingFile);
  }
  void add_partition(CLI::App* sub, bool required = true) {
    auto* o = sub->add_option("--partition", partition_path_, "Partition file")->check(CLI::ExistingFile);
    if (required) o->required();
  }

  Loaded load(bool with_partition = true) const {
    Loaded l{parse_edge_list(graph_path_), {}, {{"graph", graph_path_}}};
    if (with_partition) {
      l.partition = parse_partition(partition_path_, l.graph.node_count());
      l.inputs.push_back({"partition", partition_path_});
    }
    return l;
  }

  int emit(const std::string& command, const std::vector<InputFile>& inputs, Json payload,
           std::vector<std::string> warnings, int code) {
    Envelope e{command, inputs, std::move(payload), std::move(warnings), g_.stamp_now};
    const std::string text = render(e);
    if (g_.out.empty()) {
      out_ << text;
    } else {
      write_file(g_.out, text);
    }
    return code;
  }

  void add_profile(CLI::App& app) {
    auto* sub = app.add_subcommand("profile", "Roles, stratum masses, assortativity profile, participation");
    add_graph(sub);
    add_partition(sub);
    auto* a = sub->add_option("--attribute", attribute_path_, "Scalar attribute")->check(CLI::ExistingFile);
    auto* c = sub->add_option("--attribute-categorical", categorical_path_, "Categorical attribute")
                  ->check(CLI::ExistingFile);
    a->excludes(c);
    sub->callback([this] {
      action_ = [this] {
        auto l = load();
        const auto& p = l.partition.partition;
        const auto s = stratify_arcs(l.graph, p);
        Json payload;
        payload["directed"] = l.graph.directed();
        payload["nodes"] = l.graph.node_count();
        payload["blocks"] = label_map(l.partition.names);
        payload["masses"] = masses_json(s);
        int code = kExitOk;
        if (!attribute_path_.empty()) {
          l.inputs.push_back({"attribute", attribute_path_});
          const auto x = parse_scalar_attribute(attribute_path_, l.graph.node_count());
          const auto prof = profile_scalar(s, x);
          payload["attribute_kind"] = "scalar";
          payload["rho_global"] = to_json(rho_scalar(l.graph, x));
          payload["profile"] = to_json(prof);
          if (any_undefined(prof)) code = kExitUndefined;
        } else if (!categorical_path_.empty()) {
          l.inputs.push_back({"attribute", categorical_path_});
          const auto cat = parse_categorical_attribute(categorical_path_, l.graph.node_count());
          const auto prof = profile_categorical(s, cat.labels, cat.names.size());
          payload["attribute_kind"] = "categorical";
          payload["attribute_labels"] = label_map(cat.names);
          payload["rho_global"] = to_json(rho_categorical(l.graph, cat.labels, cat.names.size()).rho);
          payload["profile"] = to_json(prof);
          if (any_undefined(prof)) code = kExitUndefined;
        }
        Json nodes = Json::array();
        for (NodeId v = 0; v < l.graph.node_count(); ++v) {
          nodes.push_back(Json{{"node", v},
                               {"block", p.block_of(v)},
                               {"role", s.roles.interior(v) ? "interior" : "boundary"},
                               {"participation_out", real_or_null(participation(l.graph, p, v, FlowDirection::Out))},
                               {"participation_in", real_or_null(participation(l.graph, p, v, FlowDirection::In))}});
        }
        payload["participation"] = nodes;
        return emit("profile", l.inputs, std::move(payload), {}, code);
      };
    });
  }

  std::string mode_ = "default";

  void add_collapse(CLI::App& app) {
    auto* sub = app.add_subcommand("collapse", "Profile collapse decomposition with identity residuals");
    add_graph(sub);
    add_partition(sub);
    sub->add_option("--attribute", attribute_path_, "Scalar attribute")->required()->check(CLI::ExistingFile);
    sub->add_option("--mode", mode_, "Stratum weights: weighted|counts")
        ->check(CLI::IsMember({"weighted", "counts"}));
    sub->callback([this] {
      action_ = [this] {
        auto l = load();
        l.inputs.push_back({"attribute", attribute_path_});
        const auto x = parse_scalar_attribute(attribute_path_, l.graph.node_count());
        const auto s = stratify_arcs(l.graph, l.partition.partition);
        const PiMode mode = mode_ == "weighted" ? PiMode::Weighted
                            : mode_ == "counts" ? PiMode::UnweightedCounts
                                                : default_pi_mode(s);
        const auto r = collapse_decomposition(s, x, mode);
        return emit("collapse", l.inputs, to_json(r), {}, r.r_in ? kExitOk : kExitUndefined);
      };
    });
  }

  void add_signcheck(CLI::App& app) {
    auto* sub = app.add_subcommand("signcheck", "Sign conditions for the B->I component");
    add_graph(sub);
    add_partition(sub);
    sub->add_option("--attribute", attribute_path_, "Scalar attribute")->required()->check(CLI::ExistingFile);
    sub->callback([this] {
      action_ = [this] {
        auto l = load();
        l.inputs.push_back({"attribute", attribute_path_});
        const auto x = parse_scalar_attribute(attribute_path_, l.graph.node_count());
        std::vector<std::string> warnings;
        Graph g = l.graph;
        if (!g.directed()) {
          g = g.as_directed();
          warnings.push_back("undirected input analysed as its symmetric digraph");
        }
        const auto& p = l.partition.partition;
        const auto s = stratify_arcs(g, p);
        const auto r = sign_conditions(g, p, s, x);
        return emit("signcheck", l.inputs, to_json(r), std::move(warnings),
                    r.observed.has_value() ? kExitOk : kExitUndefined);
      };
    });
  }

  std::string remedy_ = "auto";
  double alpha_ = 0.85;
  bool cheeger_exact_ = false;

  void add_spectral(CLI::App& app) {
    auto* sub = app.add_subcommand("spectral", "Stationary walk, Laplacian spectrum, conductances");
    add_graph(sub);
    add_partition(sub);
    sub->add_option("--remedy", remedy_, "none|lazy|teleport|auto")
        ->check(CLI::IsMember({"none", "lazy", "teleport", "auto"}));
    sub->add_option("--alpha", alpha_, "Teleport damping");
    sub->add_flag("--cheeger-exact", cheeger_exact_, "Brute-force h(G) (n <= 18)");
    sub->callback([this] {
      action_ = [this] {
        auto l = load();
        WalkSpec spec = remedy_ == "none"       ? WalkSpec::none()
                        : remedy_ == "lazy"     ? WalkSpec::lazy()
                        : remedy_ == "teleport" ? WalkSpec::teleport(alpha_)
                                                : WalkSpec::automatic(l.graph);
        std::size_t n_max = 0;
        if (cheeger_exact_) {
          n_max = 18;
          if (l.graph.node_count() > n_max) {
            throw Error(ErrorCode::TooLarge, fmt::format("--cheeger-exact supports n <= {}", n_max));
          }
        }
        const auto r = cheeger_check(l.graph, spec, &l.partition.partition, n_max);
        return emit("spectral", l.inputs, to_json(r), {}, kExitOk);
      };
    });
  }

  std::size_t k_ = 1;

  void add_proxy(CLI::App& app) {
    auto* sub = app.add_subcommand("proxy", "Spectral proxy s_k and tail bound");
    add_graph(sub);
    sub->add_option("--k", k_, "Number of nontrivial eigenpairs kept")->required();
    sub->callback([this] {
      action_ = [this] {
        auto l = load(false);
        std::vector<std::string> warnings;
        Graph g = l.graph;
        if (g.directed()) {
          g = undirected_projection(g);
          warnings.push_back("directed input replaced by its undirected projection");
        }
        return emit("proxy", l.inputs, to_json(spectral_proxy(g, k_)), std::move(warnings), kExitOk);
      };
    });
  }

  double beta_ = 0.0, delta_ = 0.0;
  double horizon_ = 0.0, dt_ = 0.0, x0_ = 0.5;
  std::size_t sample_every_ = 1;
  std::string trajectory_path_;

  void add_rates(CLI::App* sub) {
    sub->add_option("--beta", beta_, "Infection rate")->required();
    sub->add_option("--delta", delta_, "Recovery rate")->required();
  }

  void add_sis(CLI::App& app) {
    auto* sub = app.add_subcommand("sis", "SIS endemic equilibrium (A_ji orientation: arcs tail->head transmit)");
    add_graph(sub);
    add_partition(sub, false);
    add_rates(sub);
    auto* integ = sub->add_option("--integrate", horizon_, "Integrate the ODE up to time T");
    sub->add_option("--dt", dt_, "RK4 step (default: automatic)");
    sub->add_option("--x0", x0_, "Uniform initial state for --integrate")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--sample-every", sample_every_, "Trajectory sampling stride")->check(CLI::PositiveNumber);
    sub->add_option("--trajectory", trajectory_path_, "Trajectory CSV output")->needs(integ);
    sub->callback([this] {
      action_ = [this] {
        auto l = load(!partition_path_.empty());
        const SISParams params{beta_, delta_};
        const auto eq = endemic_equilibrium(l.graph, params);
        Json payload = to_json(eq);
        if (!partition_path_.empty()) {
          const auto& p = l.partition.partition;
          payload["dominance"] = dominance_json(boundary_dominance(l.graph, p, classify_roles(l.graph, p), eq.x_star));
        }
        if (horizon_ > 0.0) {
          const std::vector<double> x0(l.graph.node_count(), x0_);
          const auto tr = integrate(x0, params, l.graph, {horizon_, dt_, sample_every_});
          double lo = 1.0, hi = 0.0;
          for (const auto& st : tr.states) {
            for (double v : st) {
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
          double dist = 0.0;
          for (std::size_t i = 0; i < eq.x_star.size(); ++i) dist = std::max(dist, std::abs(tr.states.back()[i] - eq.x_star[i]));
          payload["trajectory"] = Json{{"horizon", horizon_},
                                       {"steps", tr.steps},
                                       {"samples", tr.states.size()},
                                       {"x0", x0_},
                                       {"min_state", lo},
                                       {"max_state", hi},
                                       {"final_distance_to_equilibrium", dist},
                                       {"csv", trajectory_path_.empty() ? Json(nullptr) : Json(trajectory_path_)}};
          if (!trajectory_path_.empty()) {
            std::string csv = "t";
            for (std::size_t i = 0; i < l.graph.node_count(); ++i) csv += fmt::format(",x{}", i);
            csv += "\n";
            for (std::size_t r = 0; r < tr.states.size(); ++r) {
              csv += format_real(tr.times[r]);
              for (double v : tr.states[r]) csv += "," + format_real(v);
              csv += "\n";
            }
            write_file(trajectory_path_, csv);
          }
        }
        return emit("sis", l.inputs, std::move(payload), {}, kExitOk);
      };
    });
  }

  void add_chain(CLI::App& app) {
    auto* sub = app.add_subcommand("chain", "Spectral separation -> boundary dominance -> signed profile");
    add_graph(sub);
    add_partition(sub);
    add_rates(sub);
    sub->callback([this] {
      action_ = [this] {
        auto l = load();
        const auto r = implication_chain(l.graph, l.partition.partition, SISParams{beta_, delta_});
        std::vector<std::string> warnings;
        if (!l.graph.directed()) warnings.push_back("undirected input analysed as its symmetric digraph");
        const bool undefined = r.verdict != ChainVerdict::DiseaseFree && !r.r_bi.has_value();
        return emit("chain", l.inputs, to_json(r), std::move(warnings), undefined ? kExitUndefined : kExitOk);
      };
    });
  }

  std::string fixture_;
  std::vector<std::string> sbm_;
  std::string prefix_ = "graph";

  void add_gen(CLI::App& app) {
    auto* sub = app.add_subcommand("gen", "Write a fixture or SBM instance as edge-list + partition files");
    auto* f = sub->add_option("--fixture", fixture_, "Fixture name, e.g. amplified(0.4,0.004,30x30,7)");
    auto* s = sub->add_option("--sbm", sbm_, "SBM spec: sizes=.. p=.. q=.. seed=.. [model=..] [undirected]");
    f->excludes(s);
    sub->add_option("--out-prefix", prefix_, "Files <prefix>.edges, <prefix>.part, <prefix>.attr");
    sub->callback([this] {
      if (fixture_.empty() && sbm_.empty()) throw CLI::RequiredError("--fixture or --sbm");
      action_ = [this] {
        Json payload;
        Instance inst;
        if (!fixture_.empty()) {
          inst = fixture(fixture_);
          payload["fixture"] = inst.name;
        } else {
          const auto spec = parse_sbm_args(sbm_);
          auto [graph, part] = sbm(spec);
          inst = Instance{"sbm", std::move(graph), std::move(part), std::nullopt, std::nullopt};
          payload["sbm"] = to_json(spec);
        }
        payload["directed"] = inst.graph.directed();
        payload["nodes"] = inst.graph.node_count();
        payload["arcs"] = inst.graph.arcs().size();
        payload["blocks"] = inst.partition.block_count();
        Json files = Json::array();
        auto put = [&](const std::string& suffix, const std::string& role, const std::string& content) {
          const std::string path = prefix_ + suffix;
          write_file(path, content);
          files.push_back(Json{{"role", role}, {"path", path}});
        };
        put(".edges", "graph", write_edge_list(inst.graph));
        put(".part", "partition", write_partition(inst.partition));
        if (inst.attribute) put(".attr", "attribute", write_attribute(*inst.attribute));
        if (inst.attribute_b) put(".attr_b", "attribute_b", write_attribute(*inst.attribute_b));
        payload["files"] = files;
        return emit("gen", {}, std::move(payload), {}, kExitOk);
      };
    });
  }

  std::string q_list_;
  std::size_t replicates_ = 1;
  std::size_t jobs_ = 0;
  std::string csv_path_;

  void add_sweep(CLI::App& app) {
    auto* sub = app.add_subcommand("sweep", "Implication chain over q_between and seeded replicates");
    sub->add_option("--sbm", sbm_, "Base SBM spec (q is replaced by --q-list)")->required();
    sub->add_option("--q-list", q_list_, "Comma-separated q_between values")->required();
    add_rates(sub);
    sub->add_option("--replicates", replicates_, "Replicates per q")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", jobs_, "Worker threads (default: IBPROF_JOBS or 1)");
    sub->add_option("--csv", csv_path_, "Per-replicate CSV output");
    sub->callback([this] {
      action_ = [this] {
        auto base = parse_sbm_args(sbm_);
        const auto qs = parse_real_list(q_list_);
        std::size_t jobs = jobs_;
        if (jobs == 0) {
          const char* env = std::getenv("IBPROF_JOBS");
          jobs = env ? static_cast<std::size_t>(uint_arg("IBPROF_JOBS", env)) : 1;
          jobs = std::max<std::size_t>(jobs, 1);
        }
        const auto r = chain_sweep(base, qs, SISParams{beta_, delta_}, replicates_, jobs);
        if (!csv_path_.empty()) write_file(csv_path_, sweep_csv(r));
        Json payload = to_json(r);
        payload["csv"] = csv_path_.empty() ? Json(nullptr) : Json(csv_path_);
        return emit("sweep", {}, std::move(payload), {}, kExitOk);
      };
    });
  }
};

}  // namespace

SBMSpec parse_sbm_args(const std::vector<std::string>& args) {
  SBMSpec s;
  bool have_sizes = false, have_p = false;
  for (const auto& arg : args) {
    if (arg == "undirected") {
      s.directedness = Directedness::Undirected;
      continue;
    }
    if (arg == "directed") {
      s.directedness = Directedness::Directed;
      continue;
    }
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "sbm: expected key=value, got '" + arg + "'");
    const std::string key = arg.substr(0, eq), value = arg.substr(eq + 1);
    if (key == "sizes") {
      s.block_sizes.clear();
      std::size_t pos = 0;
      while (pos <= value.size()) {
        auto end = value.find_first_of("x,", pos);
        if (end == std::string::npos) end = value.size();
        s.block_sizes.push_back(static_cast<std::size_t>(uint_arg(key, value.substr(pos, end - pos))));
        pos = end + 1;
      }
      have_sizes = true;
    } else if (key == "p") {
      s.p_within = real_arg(key, value);
      have_p = true;
    } else if (key == "q") {
      s.q_between = real_arg(key, value);
    } else if (key == "seed") {
      s.seed = uint_arg(key, value);
    } else if (key == "weight") {
      s.weight = real_arg(key, value);
    } else if (key == "model") {
      if (value == "planted") {
        s.model = SBMModel::Planted;
      } else if (value == "amplified") {
        s.model = SBMModel::Amplified;
      } else {
        throw Error(ErrorCode::InvalidArgument, "sbm: unknown model '" + value + "'");
      }
    } else {
      throw Error(ErrorCode::InvalidArgument, "sbm: unknown key '" + key + "'");
    }
  }
  if (!have_sizes || !have_p) throw Error(ErrorCode::InvalidArgument, "sbm: sizes= and p= are required");
  return s;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    out.push_back(real_arg("list", text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace ibprof::cli
