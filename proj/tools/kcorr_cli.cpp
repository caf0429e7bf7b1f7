#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "kcorr/errors.hpp"
#include "kcorr/harness.hpp"
#include "kcorr/io.hpp"

using namespace kcorr;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string kernel = "gaussian:sigma=1";
  double c = 1.0;
  double c0 = 1.0;
  std::string p0 = "uniform:a=0,b=1";
  std::size_t m = 0;
  std::size_t r = 0;
  std::uint64_t seed = 0;
  std::string data;
  std::string out = "-";
  std::string format = "json";
  std::size_t workers = 1;

  [[nodiscard]] HdpParams hdp() const {
    HdpParams p{c, c0, Dist::parse(p0)};
    p.validate();
    return p;
  }
};

void add_common(CLI::App* sub, Common& o, bool kernel = true) {
  if (kernel) sub->add_option("--kernel", o.kernel, "Kernel spec, e.g. gaussian:sigma=1");
  sub->add_option("--c", o.c, "Group concentration");
  sub->add_option("--c0", o.c0, "Root concentration");
  sub->add_option("--p0", o.p0, "Base measure, e.g. uniform:a=0,b=1 or normal:mu=0,var=2");
  sub->add_option("--m", o.m, "Monte-Carlo size (blocks or proxy atoms)");
  sub->add_option("--r", o.r, "Gibbs sweeps for the analytics method");
  sub->add_option("--seed", o.seed, "Random seed")->required();
  sub->add_option("--data", o.data, "Grouped data CSV (group,value)");
  sub->add_option("--out", o.out, "Output path, '-' for stdout");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--workers", o.workers, "Worker threads for independent cells");
}

ordered_json report_json(const CorrelationReport& r) { return ordered_json::parse(r.to_json()); }

std::string report_csv(const std::vector<CorrelationReport>& reps) {
  std::ostringstream os;
  os << "method,kernel,cov,var1,var2,corr,m,r,seed,runtime_ms\n";
  for (const auto& r : reps) {
    os << to_string(r.method) << ",\"" << r.kernel << "\"," << r.cov << "," << r.var1 << ","
       << r.var2 << "," << r.corr << "," << r.m << "," << r.r << "," << r.seed << ","
       << r.runtime_ms << "\n";
  }
  return os.str();
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    double v = 0.0;
    try {
      v = std::stod(item);
    } catch (const std::exception&) {
      throw InputError("not a number in list: '" + item + "'");
    }
    if (v < 0.0 || v != std::floor(v)) throw InputError("list entries must be counts: " + item);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("not a number in list: '" + item + "'");
    }
  }
  return out;
}

std::optional<GroupedData> maybe_data(const Common& o) {
  if (o.data.empty()) return std::nullopt;
  return read_grouped_csv_file(o.data);
}

ordered_json calibration_json(const std::string& model, const CalibrationTarget& t,
                              const ordered_json& params, const CalibrationResiduals& res) {
  ordered_json j;
  j["model"] = model;
  j["v"] = t.v;
  j["xi"] = t.xi;
  j["t2"] = t.t2;
  j["sigma"] = t.resolved_sigma();
  j["params"] = params;
  j["residuals"] = {{"v_err", res.v_err}, {"xi_err", res.xi_err}};
  return j;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return 2;
  if (dynamic_cast<const FeasibilityError*>(&e)) return 3;
  if (dynamic_cast<const DegenerateVarianceError*>(&e)) return 3;
  if (dynamic_cast<const CapacityError*>(&e)) return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel correlation between random probability measures"};
  app.require_subcommand(1);

  Common prior_o, post_o, conv_o, stab_o, cal_o, cmp_o, clt_o, gen_o, est_o;

  auto* prior = app.add_subcommand("prior", "hDP prior kernel correlation, closed form and sampled");
  add_common(prior, prior_o);
  std::string blocks_out;
  prior->add_option("--blocks-out", blocks_out, "Write the sampled blocks as CSV");

  auto* post = app.add_subcommand("posterior", "hDP posterior kernel correlation");
  add_common(post, post_o);
  std::string method = "analytics", diagnostics;
  std::size_t burn_in = 100;
  bool v02_per_sweep = false;
  post->add_option("--method", method)->check(CLI::IsMember({"analytics", "sampling", "both"}));
  post->add_option("--burn-in", burn_in, "Gibbs sweeps before the first draw");
  post->add_option("--diagnostics", diagnostics, "Per-sweep V-term CSV (analytics)");
  post->add_flag("--v02-per-sweep", v02_per_sweep, "Average <P0*,P0*> per sweep");

  auto* conv = app.add_subcommand("convergence", "Posterior correlation decay over an (n1,n2) grid");
  add_common(conv, conv_o, false);
  std::vector<std::string> conv_kernels;
  std::string n1_grid = "16,64,256", n2_grid = "25,125,625";
  std::size_t datasets = 1;
  conv->add_option("--kernel", conv_kernels, "Kernel spec (repeatable)");
  conv->add_option("--n1-grid", n1_grid);
  conv->add_option("--n2-grid", n2_grid);
  conv->add_option("--datasets", datasets, "Independent generated datasets");

  auto* stab = app.add_subcommand("stability", "Kernel-parameter stability table");
  add_common(stab, stab_o, false);
  std::string sizes = "0,10,100,1000";
  stab->add_option("--sizes", sizes);

  auto* cal = app.add_subcommand("calibrate", "Calibrate the Gaussian model and the hDP");
  add_common(cal, cal_o, false);
  CalibrationTarget target;
  std::string model = "both";
  cal->add_option("--v", target.v, "Prior kernel variance");
  cal->add_option("--xi", target.xi, "Prior kernel correlation");
  cal->add_option("--t2", target.t2, "Marginal variance");
  cal->add_option("--sigma", target.sigma, "Gaussian kernel width (default sigma*/sqrt(2))");
  cal->add_option("--model", model)->check(CLI::IsMember({"gaussian", "hdp", "both"}));

  auto* cmp = app.add_subcommand("compare", "Predictive comparison of calibrated models");
  add_common(cmp, cmp_o, false);
  CompareConfig ccfg;
  std::string xi_list = "0.01,0.5,0.99", samples_out;
  cmp->add_option("--xi", xi_list);
  cmp->add_option("--v", ccfg.v);
  cmp->add_option("--t2", ccfg.t2);
  cmp->add_option("--sigma", ccfg.sigma);
  cmp->add_option("--n1", ccfg.n1);
  cmp->add_option("--n2", ccfg.n2);
  cmp->add_option("--samples-out", samples_out, "Write predictive samples CSV");

  auto* clt = app.add_subcommand("clt", "Variance decay of the sampling estimator");
  add_common(clt, clt_o);
  std::string m_grid = "100,1000,10000";
  std::size_t reps = 50;
  clt->add_option("--m-grid", m_grid);
  clt->add_option("--reps", reps);

  auto* gen = app.add_subcommand("gen", "Generate grouped data");
  add_common(gen, gen_o, false);
  GenConfig gcfg;
  std::string gen_model = "hdp";
  gen->add_option("--model", gen_model)->check(CLI::IsMember({"hdp", "twohdp", "gauss"}));
  gen->add_option("--n1", gcfg.n1);
  gen->add_option("--n2", gcfg.n2);
  gen->add_option("--s2", gcfg.gauss.s2);
  gen->add_option("--tau2", gcfg.gauss.tau2);
  gen->add_option("--rho", gcfg.gauss.rho);

  auto* est = app.add_subcommand("estimate", "Sampling estimator on a blocks CSV");
  add_common(est, est_o);
  std::string blocks_in;
  est->add_option("--blocks", blocks_in, "Blocks CSV (x11,x21,x12,x22)")->required();
  est->get_option("--seed")->required(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*prior) {
      auto& o = prior_o;
      const auto params = o.hdp();
      const auto k = KernelSpec::parse(o.kernel);
      const std::size_t M = o.m ? o.m : 100000;
      Rng rng = make_rng(o.seed, 0);
      const auto blocks = prior_blocks(params, M, rng);
      auto rep = corr_hat(k, blocks);
      rep.seed = o.seed;
      if (!blocks_out.empty()) {
        std::ostringstream bs;
        write_blocks_csv(bs, blocks);
        write_output(blocks_out, bs.str());
      }
      CorrelationReport closed;
      closed.method = Method::closed;
      closed.kernel = k.to_string();
      closed.corr = prior_corr_closed(params);
      closed.corr_valid = true;
      if (o.format == "csv") {
        write_output(o.out, report_csv({closed, rep}));
      } else {
        ordered_json j;
        j["closed"] = closed.corr;
        j["sampling"] = report_json(rep);
        write_output(o.out, j.dump(2) + "\n");
      }
    } else if (*post) {
      auto& o = post_o;
      if (o.data.empty()) throw InputError("posterior needs --data");
      const auto params = o.hdp();
      const auto k = KernelSpec::parse(o.kernel);
      const auto data = read_grouped_csv_file(o.data);
      std::vector<CorrelationReport> reps;
      if (method != "sampling") {
        AnalyticsOptions a;
        if (o.r) a.R = o.r;
        if (o.m) a.M = o.m;
        a.burn_in = burn_in;
        a.v02_per_sweep = v02_per_sweep;
        if (!diagnostics.empty()) a.diagnostics_csv = diagnostics;
        reps.push_back(posterior_corr_analytics(data, params, k, a, o.seed));
      }
      if (method != "analytics") {
        SamplingOptions s;
        if (o.m) s.M = o.m;
        s.burn_in = burn_in;
        reps.push_back(posterior_corr_sampling(data, params, k, s, o.seed));
      }
      if (o.format == "csv") {
        write_output(o.out, report_csv(reps));
      } else {
        ordered_json j = ordered_json::array();
        for (const auto& r : reps) j.push_back(report_json(r));
        write_output(o.out, (reps.size() == 1 ? j[0] : j).dump(2) + "\n");
      }
    } else if (*conv) {
      auto& o = conv_o;
      ConvergenceConfig cfg;
      cfg.params = o.hdp();
      cfg.n1_grid = parse_sizes(n1_grid);
      cfg.n2_grid = parse_sizes(n2_grid);
      if (!conv_kernels.empty()) {
        cfg.kernels.clear();
        for (const auto& s : conv_kernels) cfg.kernels.push_back(KernelSpec::parse(s));
      }
      if (o.r) cfg.analytics.R = o.r;
      if (o.m) cfg.analytics.M = o.m;
      cfg.seed = o.seed;
      cfg.workers = o.workers;
      cfg.data = maybe_data(o);
      const auto res = run_convergence_replicated(cfg, datasets);
      if (o.format == "csv") {
        std::string csv;
        for (std::size_t i = 0; i < res.runs.size(); ++i) {
          std::string body = res.runs[i].to_csv();
          if (i) body = body.substr(body.find('\n') + 1);
          csv += body;
        }
        write_output(o.out, csv);
      } else {
        ordered_json j;
        j["slopes"] = res.slopes;
        j["median_slopes"] = res.median_slopes;
        ordered_json cells = ordered_json::array();
        for (std::size_t i = 0; i < res.runs.size(); ++i) {
          for (const auto& c : res.runs[i].cells) {
            cells.push_back({{"dataset", i}, {"n1", c.n1}, {"n2", c.n2}, {"kernel", c.kernel},
                             {"corr", c.corr}, {"flagged", c.flagged}});
          }
        }
        j["cells"] = cells;
        write_output(o.out, j.dump(2) + "\n");
      }
    } else if (*stab) {
      auto& o = stab_o;
      StabilityConfig cfg;
      cfg.params = o.hdp();
      cfg.sizes = parse_sizes(sizes);
      if (o.r) cfg.analytics.R = o.r;
      if (o.m) cfg.analytics.M = o.m;
      cfg.seed = o.seed;
      cfg.workers = o.workers;
      cfg.data = maybe_data(o);
      const auto res = run_stability(cfg);
      if (o.format == "csv") {
        write_output(o.out, res.to_csv());
      } else {
        ordered_json cells = ordered_json::array();
        for (const auto& c : res.cells) {
          cells.push_back({{"kernel", c.kernel}, {"n", c.n}, {"corr", c.corr}, {"flagged", c.flagged}});
        }
        write_output(o.out, cells.dump(2) + "\n");
      }
    } else if (*cal) {
      auto& o = cal_o;
      ordered_json out = ordered_json::array();
      std::ostringstream csv;
      csv << "model,v,xi,t2,sigma,s2,tau2,rho,c,c0,v_err,xi_err\n";
      if (model != "hdp") {
        const auto g = calibrate_gaussian(target);
        out.push_back(calibration_json(
            "gaussian", target,
            {{"s2", g.params.s2}, {"tau2", g.params.tau2}, {"rho", g.params.rho}}, g.residuals));
        csv << "gaussian," << target.v << "," << target.xi << "," << target.t2 << ","
            << target.resolved_sigma() << "," << g.params.s2 << "," << g.params.tau2 << ","
            << g.params.rho << ",,," << g.residuals.v_err << "," << g.residuals.xi_err << "\n";
      }
      if (model != "gaussian") {
        const auto h = calibrate_hdp(target);
        out.push_back(calibration_json("hdp", target, {{"c", h.c}, {"c0", h.c0}}, h.residuals));
        csv << "hdp," << target.v << "," << target.xi << "," << target.t2 << ","
            << target.resolved_sigma() << ",,,," << h.c << "," << h.c0 << ","
            << h.residuals.v_err << "," << h.residuals.xi_err << "\n";
      }
      if (o.format == "csv") {
        write_output(o.out, csv.str());
      } else {
        write_output(o.out, (out.size() == 1 ? out[0] : out).dump(2) + "\n");
      }
    } else if (*cmp) {
      auto& o = cmp_o;
      ccfg.xi = parse_reals(xi_list);
      if (o.m) ccfg.samples = o.m;
      ccfg.seed = o.seed;
      ccfg.workers = o.workers;
      ccfg.data = maybe_data(o);
      const auto res = run_compare(ccfg);
      if (!samples_out.empty()) write_output(samples_out, res.samples_csv());
      if (o.format == "csv") {
        write_output(o.out, res.to_csv());
      } else {
        ordered_json j;
        j["xi"] = res.xi;
        j["gauss_gauss"] = res.gg;
        j["hdp_hdp"] = res.hh;
        j["gauss_hdp"] = res.gh;
        write_output(o.out, j.dump(2) + "\n");
      }
    } else if (*clt) {
      auto& o = clt_o;
      const auto params = o.hdp();
      const auto k = KernelSpec::parse(o.kernel);
      const BlockGenerator g = [&](std::size_t M, Rng& rng) { return prior_blocks(params, M, rng); };
      const auto res = estimator_clt_check(g, k, parse_sizes(m_grid), reps, o.seed);
      if (o.format == "csv") {
        std::ostringstream os;
        os << "m,variance\n";
        for (std::size_t i = 0; i < res.m_grid.size(); ++i) {
          os << res.m_grid[i] << "," << res.variances[i] << "\n";
        }
        write_output(o.out, os.str());
      } else {
        ordered_json j;
        j["m_grid"] = res.m_grid;
        j["variances"] = res.variances;
        j["slope"] = res.slope;
        j["residuals"] = res.residuals;
        j["ratios"] = res.ratios;
        j["degenerate"] = res.degenerate;
        write_output(o.out, j.dump(2) + "\n");
      }
    } else if (*gen) {
      auto& o = gen_o;
      gcfg.model = gen_model == "hdp" ? GenModel::hdp
                   : gen_model == "twohdp" ? GenModel::twohdp
                                           : GenModel::gauss;
      gcfg.hdp = o.hdp();
      gcfg.seed = o.seed;
      std::ostringstream os;
      write_grouped_csv(os, gen_data(gcfg));
      write_output(o.out, os.str());
    } else if (*est) {
      auto& o = est_o;
      std::ifstream in(blocks_in);
      if (!in) throw InputError("cannot open " + blocks_in);
      const auto blocks = read_blocks_csv(in);
      auto k = KernelSpec::parse(o.kernel);
      auto rep = corr_hat(k, blocks);
      if (o.format == "csv") {
        write_output(o.out, report_csv({rep}));
      } else {
        write_output(o.out, rep.to_json() + "\n");
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
