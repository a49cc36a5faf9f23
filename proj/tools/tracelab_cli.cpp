// Command-line driver: classify / certify / blowup over martingale
// difference subspaces.  Exit codes: 0 success or certified, 1 property
// refuted with witness, 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tracelab/bellman.hpp"
#include "tracelab/experiments.hpp"
#include "tracelab/groupfourier.hpp"
#include "tracelab/io.hpp"
#include "tracelab/kappa.hpp"
#include "tracelab/subspace.hpp"
#include "tracelab/transform.hpp"

#ifndef TRACELAB_VERSION
#define TRACELAB_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using namespace tracelab;

struct SpaceSpec {
  std::string text;
  std::optional<GroupSpace> group;  // set for builtin specs
  Subspace W;
};

// "builtin:{grad|div}:mu=M,d=D" or a subspace file path.
SpaceSpec parse_space(const std::string& text) {
  SpaceSpec spec;
  spec.text = text;
  if (text.rfind("builtin:", 0) != 0) {
    spec.W = load_subspace(text);
    return spec;
  }
  std::string rest = text.substr(8);
  auto colon = rest.find(':');
  require(colon != std::string::npos,
          "builtin spec must look like builtin:grad:mu=M,d=D");
  std::string family = rest.substr(0, colon);
  int mu = 0, d = 0;
  require(std::sscanf(rest.c_str() + colon + 1, "mu=%d,d=%d", &mu, &d) == 2,
          "builtin spec must look like builtin:grad:mu=M,d=D");
  if (family == "grad") {
    spec.group = build_W_grad(mu, d);
  } else if (family == "div") {
    spec.group = build_W_div(mu, d);
  } else {
    throw Error("unknown builtin family: " + family);
  }
  spec.W = spec.group->realify();
  return spec;
}

// Named operator kinds, or a file (--phi-domain selects the format).
TransformOp parse_phi(const std::string& text, const std::string& domain,
                      const SpaceSpec& space, double alpha, uint64_t seed) {
  if (text == "random") return random_transform(space.W, seed);
  if (text == "coordinate") return coordinate_transform(space.W, 0);
  if (text == "kernel-random" || text == "kernel-canceling") {
    require(bool(space.group),
            "kernel operators need a builtin space: " + text);
    ConvKernel K = random_kernel(*space.group, seed);
    if (text == "kernel-canceling") K = canceling_projection(*space.group, K);
    return kernel_transform(*space.group, K, space.W);
  }
  if (text == "mean0") {
    auto classes = extremal_vectors(space.W, alpha);
    require(!classes.empty(), "mean0 operator needs extremal vectors");
    return mean_zero_witness(space.W, classes.front(), 0, seed);
  }
  if (domain == "freq") {
    require(bool(space.group), "a symbol file needs a builtin space");
    auto [g, M] = load_symbol(text);
    require(g.mu == space.group->g.mu && g.d == space.group->g.d,
            "symbol group does not match the space");
    return kernel_transform(*space.group, kernel_from_symbol(*space.group, M),
                            space.W);
  }
  TransformOp phi = load_transform(text);
  require(phi.m == space.W.m && phi.ell == space.W.ell,
          "operator shape does not match the space");
  return phi;
}

void emit(const json& report, const std::string& out_path,
          const std::string& format) {
  std::string body;
  if (format == "csv") {
    // Flat key,value rows; array-valued entries become one row per element.
    std::ostringstream os;
    os.precision(17);
    for (const auto& [key, value] : report.items()) {
      if (value.is_array()) {
        for (size_t i = 0; i < value.size(); ++i)
          os << key << '[' << i << "]," << value[i].dump() << '\n';
      } else {
        os << key << ',' << value.dump() << '\n';
      }
    }
    body = os.str();
  } else {
    body = report.dump(2) + "\n";
  }
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_path);
    require(bool(out), "cannot open output file: " + out_path);
    out << body;
  }
}

json provenance(const std::string& space, uint64_t seed, int64_t budget,
                int jobs) {
  json p;
  p["version"] = TRACELAB_VERSION;
  p["space"] = space;
  p["seed"] = seed;
  p["budget"] = budget;
  p["jobs"] = jobs;
  return p;
}

json classes_summary(const std::vector<ExtremalClass>& classes) {
  json arr = json::array();
  for (const auto& c : classes) {
    json e;
    e["support"] = c.support;
    e["direction_dim"] = int(c.directions.cols());
    arr.push_back(e);
  }
  return arr;
}

int run_classify(const std::string& space_text, uint64_t seed,
                 const std::string& out_path, const std::string& format) {
  SpaceSpec space = parse_space(space_text);
  GeometricReport geo = is_geometric(space.W);

  json report;
  report["space"] = space_text;
  report["m"] = space.W.m;
  report["ell"] = space.W.ell;
  report["dim"] = space.W.dim();
  report["geometric"] = geo.geometric;
  report["degenerate"] = geo.degenerate;
  report["alpha"] = geo.alpha;
  report["alpha_from_zero"] = geo.alpha_from_zero;
  report["max_affine_deviation"] = geo.max_affine_deviation;
  report["kappa_thetas"] = geo.thetas;
  report["kappa_values"] = geo.values;
  report["extremal_classes"] = classes_summary(geo.witnesses);

  if (geo.geometric && !geo.degenerate) {
    report["alpha_snapped"] = geo.alpha_snapped;
    NonLocalityReport nl = is_nonlocal(space.W, geo.alpha_snapped);
    report["nonlocal"] = nl.nonlocal;
    report["nonlocal_vacuous"] = nl.vacuous;
    report["solution_dims"] = nl.solution_dims;
    report["expected_dims"] = nl.expected_dims;
  }

  if (space.group) {
    const GroupSpace& sp = *space.group;
    int k = sp.kind == SpaceKind::Gradient ? 1 : sp.g.d - 1;
    FourierClassification fc = classify_geometric_by_fourier(sp, k, 2000, seed);
    json f;
    f["ok"] = fc.ok;
    f["k"] = fc.k;
    f["alpha"] = fc.alpha;
    f["max_count_seen"] = fc.max_count_seen;
    f["outside_hypothesis"] = fc.outside_hypothesis;
    if (!fc.failure.empty()) f["failure"] = fc.failure;
    if (fc.ok) {
      NonLocalFourierReport nf =
          check_nonlocal_by_fourier(sp, fc.witness_subgroup,
                                    fc.witness_direction);
      f["nonlocal"] = nf.nonlocal;
      f["line_dim"] = nf.line_dim;
      require(!geo.geometric || std::abs(fc.alpha - geo.alpha) < 1e-6,
              "spectral and kappa classifications disagree on the order");
    }
    report["fourier"] = f;
    if (fc.outside_hypothesis)
      report["warning"] = "outside hypothesis mu >= 4";
  }

  report["provenance"] = provenance(space_text, seed, 0, 1);
  emit(report, out_path, format);
  return 0;
}

json certify_json(const CertifyReport& r) {
  json c;
  c["certified"] = r.certified;
  c["min_found"] = r.min_found;
  c["candidate"] = r.candidate_desc;
  c["alpha"] = r.alpha;
  c["structured_count"] = r.structured_count;
  c["random_count"] = r.random_count;
  c["descent_starts"] = r.descent_starts;
  c["degenerate_count"] = r.degenerate_count;
  c["early_refuted"] = r.early_refuted;
  if (!r.certified) {
    json w;
    w["y"] = r.witness.y;
    w["zs"] = std::vector<double>(r.witness.zs.begin(), r.witness.zs.end());
    w["ts"] = std::vector<double>(r.witness.ts.begin(), r.witness.ts.end());
    w["ss"] = std::vector<double>(r.witness.ss.begin(), r.witness.ss.end());
    std::vector<double> xs(r.witness.xs.data(),
                           r.witness.xs.data() + r.witness.xs.size());
    w["xs"] = xs;
    c["witness"] = w;
  }
  return c;
}

int run_certify(const std::string& space_text, const std::string& phi_text,
                const std::string& phi_domain, double alpha,
                const std::string& kind, int64_t budget, uint64_t seed,
                int jobs, const std::string& out_path,
                const std::string& format) {
  SpaceSpec space = parse_space(space_text);
  TransformOp phi = parse_phi(phi_text, phi_domain, space, alpha, seed);

  json report;
  report["space"] = space_text;
  report["phi"] = phi_text;
  report["alpha"] = alpha;
  report["kind"] = kind;
  report["provenance"] = provenance(space_text, seed, budget, jobs);

  bool certified = false;
  if (kind == "z_slack") {
    CertifyReport r = certify_main_inequality(Candidate::z_slack(), space.W,
                                              phi, alpha, budget, seed, jobs);
    certified = r.certified;
    report["certification"] = certify_json(r);
  } else {
    CandidateKind ck;
    if (kind == "subcritical") {
      ck = CandidateKind::Subcritical;
    } else if (kind == "endpoint") {
      ck = CandidateKind::Endpoint;
    } else {
      throw Error("unknown candidate kind: " + kind);
    }
    SearchReport r =
        search_constants(ck, space.W, phi, alpha, budget, seed, jobs);
    certified = r.found;
    report["found"] = r.found;
    report["ladders_tried"] = r.ladders_tried;
    report["best_min"] = r.best_min;
    report["certification"] = certify_json(r.certification);
  }
  emit(report, out_path, format);
  return certified ? 0 : 1;
}

int run_blowup(const std::string& space_text, const std::string& phi_text,
               const std::string& phi_domain, double alpha_flag,
               std::vector<int> Ns, uint64_t seed, const std::string& out_path,
               const std::string& format) {
  SpaceSpec space = parse_space(space_text);
  GeometricReport geo = is_geometric(space.W);
  require(geo.geometric && !geo.degenerate,
          "blow-up probe needs a geometric space of definite order");
  double alpha = alpha_flag > 0 ? alpha_flag : geo.alpha_snapped;
  TransformOp phi = parse_phi(phi_text, phi_domain, space, alpha, seed);
  if (Ns.empty()) Ns = {16, 32, 64};

  BlowupReport r = blowup_probe(space.W, phi, alpha, Ns);

  if (format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "N,ratio\n";
    for (size_t i = 0; i < r.Ns.size(); ++i)
      os << r.Ns[i] << ',' << r.ratios[i] << '\n';
    if (out_path.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream out(out_path);
      require(bool(out), "cannot open output file: " + out_path);
      out << os.str();
    }
    return 0;
  }

  json report;
  report["space"] = space_text;
  report["phi"] = phi_text;
  report["alpha"] = alpha;
  report["N"] = r.Ns;
  report["ratios"] = r.ratios;
  report["slope"] = r.all_zero ? json() : json(r.slope);
  report["all_zero"] = r.all_zero;
  report["xi_mean"] = r.xi_mean;
  report["provenance"] = provenance(space_text, seed, 0, 1);
  emit(report, out_path, "json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace inequality laboratory for martingale transforms"};
  app.require_subcommand(1);

  std::string space_text, phi_text = "random", phi_domain = "time";
  std::string kind = "endpoint", out_path, format = "json";
  double alpha = 0.0;
  int64_t budget = 1000000;
  uint64_t seed = 1;
  int jobs = int(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  std::vector<int> Ns;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--space", space_text,
                    "builtin:{grad|div}:mu=M,d=D or a subspace file")
        ->required();
    cmd->add_option("--seed", seed, "deterministic master seed");
    cmd->add_option("--out", out_path, "report file (default stdout)");
    cmd->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_phi = [&](CLI::App* cmd) {
    cmd->add_option(
        "--phi", phi_text,
        "random | coordinate | kernel-random | kernel-canceling | mean0 | file");
    cmd->add_option("--phi-domain", phi_domain,
                    "file format: time (transform) or freq (symbol)")
        ->check(CLI::IsMember({"time", "freq"}));
  };

  CLI::App* classify = app.add_subcommand(
      "classify", "order, extremal vectors, non-locality, spectral checks");
  add_common(classify);

  CLI::App* certify = app.add_subcommand(
      "certify", "search and certify a supersolution candidate");
  add_common(certify);
  add_phi(certify);
  certify->add_option("--alpha", alpha, "order of the inequality")->required();
  certify->add_option("--kind", kind, "z_slack | subcritical | endpoint")
      ->check(CLI::IsMember({"z_slack", "subcritical", "endpoint"}));
  certify->add_option("--budget", budget, "sampler budget per ladder");
  certify->add_option("--jobs", jobs, "worker threads");

  CLI::App* blowup = app.add_subcommand(
      "blowup", "accumulated-sum growth table for an extremal martingale");
  add_common(blowup);
  add_phi(blowup);
  blowup->add_option("--alpha", alpha, "order (default: classified order)");
  blowup->add_option("--N", Ns, "depths for the growth table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed())
      return run_classify(space_text, seed, out_path, format);
    if (certify->parsed())
      return run_certify(space_text, phi_text, phi_domain, alpha, kind, budget,
                         seed, jobs, out_path, format);
    return run_blowup(space_text, phi_text, phi_domain, alpha, Ns, seed,
                      out_path, format);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
