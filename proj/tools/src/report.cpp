#include "ibprof/cli/report.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>
#include <sys/stat.h>

#include <cmath>
#include <ctime>
#include <algorithm>
#include <fstream>

#include "ibprof/cli/io.hpp"
#include "ibprof/error.hpp"

#ifndef IBPROF_VERSION
#define IBPROF_VERSION "0.0.0"
#endif

namespace ibprof::cli {

namespace {

void dump_into(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(key).dump();
        out += ": ";
        dump_into(value, out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_into(value, out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : std::string("null");
      return;
    }
    default:
      out += j.dump();
  }
}

std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json blocks_json(const std::vector<BlockConductance>& blocks) {
  Json arr = Json::array();
  for (const auto& b : blocks) {
    Json o;
    o["block"] = b.block;
    o["phi"] = real_or_null(b.phi);
    if (!b.phi) o["reason"] = "trivial_or_zero_mass";
    arr.push_back(o);
  }
  return arr;
}

Json check_json(const ConditionCheck& c) {
  return Json{{"holds", c.holds}, {"margin", c.margin}};
}

Json doubles(std::span<const double> v) {
  Json arr = Json::array();
  for (double d : v) arr.push_back(d);
  return arr;
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

Json input_timestamp(const std::vector<InputFile>& inputs, bool now) {
  if (now) return iso_utc(std::time(nullptr));
  if (inputs.empty()) return nullptr;
  std::time_t latest = 0;
  for (const auto& f : inputs) {
    struct stat st {};
    if (::stat(f.path.c_str(), &st) != 0) throw Error(ErrorCode::InvalidArgument, "cannot stat " + f.path);
    latest = std::max(latest, st.st_mtime);
  }
  return iso_utc(latest);
}

std::string render(const Envelope& e) {
  Json j;
  j["tool"] = kToolName;
  j["tool_version"] = IBPROF_VERSION;
  j["command"] = e.command;
  Json inputs = Json::array();
  for (const auto& f : e.inputs) {
    inputs.push_back(Json{{"role", f.role}, {"path", f.path}, {"sha256", sha256_file(f.path)}});
  }
  j["inputs"] = inputs;
  j["timestamp"] = input_timestamp(e.inputs, e.stamp_now);
  j["payload"] = e.payload;
  j["warnings"] = e.warnings;
  return dump(j);
}

Json real_or_null(std::optional<double> v) {
  if (!v) return nullptr;
  return *v;
}

Json to_json(const Coefficient& c) {
  Json o;
  o["value"] = real_or_null(c.value);
  o["reason"] = c.reason ? Json(std::string(to_string(*c.reason))) : Json(nullptr);
  return o;
}

Json to_json(const AssortProfile& p) {
  Json arr = Json::array();
  for (const auto& e : p.entries) {
    Json o;
    o["stratum"] = std::string(stratum_name(e.stratum, p.directed));
    o["mass"] = e.edge_mass;
    o["arc_mass"] = e.mass;
    o["arc_count"] = e.count;
    o["rho"] = real_or_null(e.rho.value);
    o["reason"] = e.rho.reason ? Json(std::string(to_string(*e.rho.reason))) : Json(nullptr);
    arr.push_back(o);
  }
  return arr;
}

Json to_json(const CollapseReport& r) {
  Json o;
  o["mode"] = std::string(to_string(r.mode));
  Json strata = Json::array();
  for (const auto& s : r.strata) {
    Json t;
    t["stratum"] = std::string(stratum_name(s.stratum, r.directed));
    t["count"] = s.count;
    t["pi"] = s.pi;
    t["mean_x"] = s.mean_x;
    t["mean_y"] = s.mean_y;
    t["sigma_x"] = s.sigma_x;
    t["sigma_y"] = s.sigma_y;
    t["cov"] = s.cov;
    t["r"] = real_or_null(s.r);
    if (!s.r) t["reason"] = s.count == 0 ? "empty_stratum" : "zero_variance";
    strata.push_back(t);
  }
  o["strata"] = strata;
  o["mean_x_in"] = r.mean_x_in;
  o["mean_y_in"] = r.mean_y_in;
  o["sigma_x_in"] = r.sigma_x_in;
  o["sigma_y_in"] = r.sigma_y_in;
  o["cov_in"] = r.cov_in;
  o["r_in"] = real_or_null(r.r_in);
  if (!r.r_in) o["r_in_reason"] = "zero_variance";
  o["cov_within"] = r.cov_within;
  o["cov_between"] = r.cov_between;
  o["cov_residual"] = r.cov_residual;
  o["cov_residual_relative"] = r.relative_cov_residual();
  o["corr_residual"] = real_or_null(r.corr_residual);
  if (!r.corr_residual) o["corr_residual_reason"] = "zero_variance";
  return o;
}

Json to_json(const SignConditionsReport& r) {
  Json o;
  o["mode"] = std::string(to_string(r.mode));
  if (r.mode == PiMode::Weighted) o["note"] = "weighted pi_k and arc-weighted endpoint means extend the count-based statement";
  Json groups = Json::array();
  for (const auto& g : r.groups) {
    Json t;
    t["block"] = g.block;
    t["interior"] = g.interior;
    t["boundary"] = g.boundary;
    t["mu_boundary"] = real_or_null(g.mu_boundary);
    t["mu_interior"] = real_or_null(g.mu_interior);
    t["b_to_i_arcs"] = g.bi_count;
    t["pi"] = g.pi;
    t["mean_tail"] = real_or_null(g.mean_tail);
    t["mean_head"] = real_or_null(g.mean_head);
    t["cov"] = real_or_null(g.cov);
    groups.push_back(t);
  }
  o["groups"] = groups;
  o["mean_tail"] = r.mean_tail;
  o["mean_head"] = r.mean_head;
  o["var_tail"] = r.var_tail;
  o["var_head"] = r.var_head;
  o["cov_within"] = r.cov_within;
  o["between"] = r.between;
  o["spread"] = r.spread;
  o["conditions"] = Json{{"i_boundary_dominance", check_json(r.boundary_dominance)},
                         {"ii_endpoint_mean_dominance", check_json(r.endpoint_mean_dominance)},
                         {"iii_nondegenerate", check_json(r.nondegenerate)},
                         {"iv_within_nonpositive", check_json(r.within_nonpositive)},
                         {"v_between_nonpositive", check_json(r.between_nonpositive)}};
  o["strict_within"] = r.strict_within;
  o["strict_between"] = r.strict_between;
  o["strictness"] = r.strictness;
  o["verdict"] = std::string(to_string(r.verdict));
  o["observed_r_b_to_i"] = to_json(r.observed);
  o["observed_sample_r"] = to_json(r.observed_sample);
  return o;
}

Json to_json(const WalkSpec& w) {
  Json o;
  o["remedy"] = std::string(to_string(w.remedy));
  if (w.remedy == Remedy::Teleport) {
    o["alpha"] = w.alpha;
    o["pi0"] = w.pi0.empty() ? Json("uniform") : doubles(w.pi0);
  }
  return o;
}

Json to_json(const SpectralReport& r) {
  Json o;
  o["walk"] = to_json(r.walk);
  o["stationary"] = Json{{"phi", doubles(r.stationary.phi)},
                         {"residual", r.stationary.residual},
                         {"iterations", r.stationary.iterations}};
  o["lambda"] = doubles(r.lambda);
  o["lambda_2"] = r.lambda.size() >= 2 ? Json(r.lambda[1]) : Json(nullptr);
  o["h_exact"] = real_or_null(r.h_exact);
  if (r.h_exact) {
    o["h_argmin"] = r.h_argmin;
    o["sandwich"] = Json{{"lower", *r.h_exact * *r.h_exact / 2.0},
                         {"upper", 2.0 * *r.h_exact},
                         {"slack", kCheegerSlack},
                         {"holds", r.sandwich_holds.value_or(false)}};
  }
  o["blocks"] = blocks_json(r.blocks);
  o["phi_max"] = real_or_null(r.phi_max);
  return o;
}

Json to_json(const SpectralProxy& r) {
  Json o;
  o["k"] = r.k;
  o["lambda"] = doubles(r.lambda);
  o["tail_bound"] = r.tail_bound;
  Json rows = Json::array();
  for (std::size_t v = 0; v < r.s_k.size(); ++v) {
    rows.push_back(Json{{"node", v}, {"s_k", r.s_k[v]}, {"s_inf", r.s_inf[v]}, {"gap", r.s_inf[v] - r.s_k[v]}});
  }
  o["nodes"] = rows;
  return o;
}

Json to_json(const EquilibriumResult& r) {
  Json o;
  o["method"] = std::string(to_string(r.method));
  o["spectral_radius"] = r.spectral_radius;
  o["threshold_margin"] = r.threshold_margin;
  o["disease_free"] = r.threshold_margin <= 0.0;
  o["iterations"] = r.iterations;
  o["residual"] = r.residual;
  o["rhs_residual"] = r.rhs_residual;
  if (r.method == EquilibriumMethod::FixedPoint) o["monotone"] = r.monotone;
  o["x_star"] = doubles(r.x_star);
  return o;
}

Json to_json(const ChainReport& r) {
  Json o;
  o["walk"] = to_json(r.walk);
  o["phi_per_block"] = blocks_json(r.phi_per_block);
  o["phi_max"] = real_or_null(r.phi_max);
  o["equilibrium"] = to_json(r.equilibrium);
  Json dom = Json::array();
  for (const auto& d : r.dominance) {
    Json t;
    t["block"] = d.block;
    t["skipped"] = d.skipped == DominanceSkip::None ? Json(nullptr) : Json(std::string(to_string(d.skipped)));
    t["mean_boundary"] = real_or_null(d.mean_boundary);
    t["mean_interior"] = real_or_null(d.mean_interior);
    t["gap"] = real_or_null(d.gap);
    t["dominant"] = d.dominant;
    dom.push_back(t);
  }
  o["dominance"] = dom;
  o["dominance_all"] = r.dominance_all;
  o["min_gap"] = real_or_null(r.min_gap);
  o["profile"] = to_json(r.profile);
  o["r_b_to_i"] = to_json(r.r_bi);
  o["sign_conditions"] = r.sign_report ? to_json(*r.sign_report) : Json(nullptr);
  o["premises_hold"] = r.premises_hold;
  o["prediction"] = r.prediction;
  o["conclusion_holds"] = r.conclusion_holds;
  o["verdict"] = std::string(to_string(r.verdict));
  o["notes"] = r.notes;
  return o;
}

Json to_json(const SBMSpec& s) {
  Json o;
  o["block_sizes"] = s.block_sizes;
  o["p_within"] = s.p_within;
  o["q_between"] = s.q_between;
  o["weight"] = s.weight;
  o["directed"] = s.directedness == Directedness::Directed;
  o["seed"] = s.seed;
  o["model"] = std::string(to_string(s.model));
  return o;
}

Json to_json(const SweepResult& r) {
  Json o;
  Json base = to_json(r.base);
  base.erase("q_between");
  o["base"] = base;
  o["params"] = Json{{"beta", r.params.beta}, {"delta", r.params.delta}};
  Json records = Json::array();
  for (const auto& rec : r.records) {
    Json t;
    t["q_between"] = rec.q_between;
    t["replicate"] = rec.replicate;
    t["seed"] = rec.seed;
    t["phi_max"] = real_or_null(rec.phi_max);
    t["min_gap"] = real_or_null(rec.min_gap);
    t["dominance_all"] = rec.dominance_all;
    t["r_b_to_i"] = to_json(rec.r_bi);
    t["negative"] = rec.negative;
    t["prediction"] = rec.prediction;
    t["verdict"] = std::string(to_string(rec.verdict));
    records.push_back(t);
  }
  o["records"] = records;
  Json summary = Json::array();
  for (const auto& s : r.summary) {
    summary.push_back(Json{{"q_between", s.q_between},
                           {"replicates", s.replicates},
                           {"dominance_fraction", s.dominance_fraction},
                           {"negative_fraction", s.negative_fraction},
                           {"both_fraction", s.both_fraction},
                           {"premises_fraction", s.premises_fraction}});
  }
  o["summary"] = summary;
  return o;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "q_between,replicate,seed,phi_max,min_gap,dominance_all,r_b_to_i,negative,prediction,verdict\n";
  auto opt = [](std::optional<double> v) { return v ? format_real(*v) : std::string(); };
  for (const auto& rec : r.records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", format_real(rec.q_between), rec.replicate, rec.seed,
                       opt(rec.phi_max), opt(rec.min_gap), rec.dominance_all ? 1 : 0, opt(rec.r_bi.value),
                       rec.negative ? 1 : 0, rec.prediction ? 1 : 0, to_string(rec.verdict));
  }
  return out;
}

}  // namespace ibprof::cli
