#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kcorr/errors.hpp"
#include "kcorr/harness.hpp"

namespace py = pybind11;
using namespace kcorr;

namespace {

py::dict report_dict(const CorrelationReport& r) {
  py::dict d;
  d["method"] = to_string(r.method);
  d["kernel"] = r.kernel;
  d["cov"] = r.cov;
  d["var1"] = r.var1;
  d["var2"] = r.var2;
  d["corr"] = r.corr;
  d["corr_out_of_range"] = r.out_of_range;
  d["m"] = r.m;
  d["r"] = r.r;
  d["seed"] = r.seed;
  d["runtime_ms"] = r.runtime_ms;
  d["cross_sum"] = r.cross_path;
  return d;
}

HdpParams hdp(double c, double c0, const std::string& p0) {
  HdpParams p{c, c0, Dist::parse(p0)};
  p.validate();
  return p;
}

GroupedData grouped(std::vector<double> x1, std::vector<double> x2) {
  return GroupedData{{std::move(x1), std::move(x2)}};
}

std::vector<double> column(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                           py::ssize_t j) {
  auto v = a.unchecked<2>();
  std::vector<double> out(static_cast<std::size_t>(v.shape(0)));
  for (py::ssize_t i = 0; i < v.shape(0); ++i) out[static_cast<std::size_t>(i)] = v(i, j);
  return out;
}

py::dict calibration_dict(const CalibrationTarget& t, const CalibrationResiduals& r) {
  py::dict d;
  d["v"] = t.v;
  d["xi"] = t.xi;
  d["t2"] = t.t2;
  d["sigma"] = t.resolved_sigma();
  d["v_err"] = r.v_err;
  d["xi_err"] = r.xi_err;
  return d;
}

CalibrationTarget target(double v, double xi, double t2, double sigma) {
  CalibrationTarget t;
  t.v = v;
  t.xi = xi;
  t.t2 = t2;
  t.sigma = sigma;
  return t;
}

}  // namespace

PYBIND11_MODULE(_kcorr, m) {
  m.doc() = "Kernel correlation between random probability measures";

  auto base = py::register_exception<Error>(m, "KcorrError");
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<DegenerateVarianceError>(m, "DegenerateVarianceError", base.ptr());
  py::register_exception<FeasibilityError>(m, "FeasibilityError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<InternalConsistencyError>(m, "InternalConsistencyError", base.ptr());

  m.def("kernel_eval", [](const std::string& k, double x, double y) {
    return eval(KernelSpec::parse(k), x, y);
  }, py::arg("kernel"), py::arg("x"), py::arg("y"));

  m.def("normalize_kernel", [](const std::string& k) { return KernelSpec::parse(k).to_string(); },
        py::arg("kernel"));

  m.def("prior_corr_closed", [](double c, double c0) { return prior_corr_closed(hdp(c, c0, "uniform:a=0,b=1")); },
        py::arg("c") = 1.0, py::arg("c0") = 1.0);

  m.def("prior_corr_sampling",
        [](const std::string& k, double c, double c0, const std::string& p0, std::size_t M,
           std::uint64_t seed) {
          return report_dict(prior_corr_sampling(hdp(c, c0, p0), KernelSpec::parse(k), M, seed));
        },
        py::arg("kernel") = "gaussian:sigma=1", py::arg("c") = 1.0, py::arg("c0") = 1.0,
        py::arg("p0") = "uniform:a=0,b=1", py::arg("m") = 100000, py::arg("seed"));

  m.def("corr_hat",
        [](const std::string& k, const py::array_t<double, py::array::c_style | py::array::forcecast>& blocks) {
          if (blocks.ndim() != 2 || blocks.shape(1) != 4) {
            throw InputError("blocks must have shape (M, 4): x11, x21, x12, x22");
          }
          BlockSet b;
          const auto x11 = column(blocks, 0), x21 = column(blocks, 1), x12 = column(blocks, 2),
                     x22 = column(blocks, 3);
          b.reserve(x11.size());
          for (std::size_t t = 0; t < x11.size(); ++t) b.push(x11[t], x21[t], x12[t], x22[t]);
          return report_dict(corr_hat(KernelSpec::parse(k), b));
        },
        py::arg("kernel"), py::arg("blocks"));

  m.def("posterior_corr_analytics",
        [](std::vector<double> x1, std::vector<double> x2, const std::string& k, double c,
           double c0, const std::string& p0, std::size_t R, std::size_t M, std::size_t burn_in,
           std::uint64_t seed) {
          AnalyticsOptions o;
          o.R = R;
          o.M = M;
          o.burn_in = burn_in;
          return report_dict(posterior_corr_analytics(grouped(std::move(x1), std::move(x2)),
                                                      hdp(c, c0, p0), KernelSpec::parse(k), o, seed));
        },
        py::arg("x1"), py::arg("x2"), py::arg("kernel") = "gaussian:sigma=1", py::arg("c") = 1.0,
        py::arg("c0") = 1.0, py::arg("p0") = "uniform:a=0,b=1", py::arg("r") = 1000,
        py::arg("m") = 10000, py::arg("burn_in") = 100, py::arg("seed"));

  m.def("posterior_corr_sampling",
        [](std::vector<double> x1, std::vector<double> x2, const std::string& k, double c,
           double c0, const std::string& p0, std::size_t M, std::size_t burn_in, std::uint64_t seed) {
          SamplingOptions o;
          o.M = M;
          o.burn_in = burn_in;
          return report_dict(posterior_corr_sampling(grouped(std::move(x1), std::move(x2)),
                                                     hdp(c, c0, p0), KernelSpec::parse(k), o, seed));
        },
        py::arg("x1"), py::arg("x2"), py::arg("kernel") = "gaussian:sigma=1", py::arg("c") = 1.0,
        py::arg("c0") = 1.0, py::arg("p0") = "uniform:a=0,b=1", py::arg("m") = 10000,
        py::arg("burn_in") = 100, py::arg("seed"));

  m.def("calibrate_gaussian",
        [](double v, double xi, double t2, double sigma) {
          const auto t = target(v, xi, t2, sigma);
          const auto g = calibrate_gaussian(t);
          auto d = calibration_dict(t, g.residuals);
          d["s2"] = g.params.s2;
          d["tau2"] = g.params.tau2;
          d["rho"] = g.params.rho;
          return d;
        },
        py::arg("v") = 0.25, py::arg("xi") = 0.5, py::arg("t2") = 2.0, py::arg("sigma") = 0.0);

  m.def("calibrate_hdp",
        [](double v, double xi, double t2, double sigma) {
          const auto t = target(v, xi, t2, sigma);
          const auto h = calibrate_hdp(t);
          auto d = calibration_dict(t, h.residuals);
          d["c"] = h.c;
          d["c0"] = h.c0;
          return d;
        },
        py::arg("v") = 0.25, py::arg("xi") = 0.5, py::arg("t2") = 2.0, py::arg("sigma") = 0.0);

  m.def("param_posterior_corr",
        [](std::size_t n1, std::size_t n2, double s2, double tau2, double rho) {
          return param_posterior_corr(n1, n2, GaussParams{s2, tau2, rho});
        },
        py::arg("n1"), py::arg("n2"), py::arg("s2"), py::arg("tau2"), py::arg("rho"));

  m.def("kernel_corr_gauss_prior",
        [](double s2, double tau2, double rho, double sigma) {
          return kernel_corr_gauss_prior(GaussParams{s2, tau2, rho}, sigma);
        },
        py::arg("s2"), py::arg("tau2"), py::arg("rho"), py::arg("sigma"));

  m.def("gen_data",
        [](const std::string& model, std::size_t n1, std::size_t n2, std::uint64_t seed, double c,
           double c0, const std::string& p0, double s2, double tau2, double rho) {
          GenConfig g;
          if (model == "hdp") {
            g.model = GenModel::hdp;
          } else if (model == "twohdp") {
            g.model = GenModel::twohdp;
          } else if (model == "gauss") {
            g.model = GenModel::gauss;
          } else {
            throw InputError("model must be hdp, twohdp or gauss");
          }
          g.n1 = n1;
          g.n2 = n2;
          g.seed = seed;
          g.hdp = hdp(c, c0, p0);
          g.gauss = GaussParams{s2, tau2, rho};
          const auto d = gen_data(g);
          return py::make_tuple(d.x[0], d.x[1]);
        },
        py::arg("model") = "hdp", py::arg("n1") = 10, py::arg("n2") = 10, py::arg("seed"),
        py::arg("c") = 1.0, py::arg("c0") = 1.0, py::arg("p0") = "uniform:a=0,b=1",
        py::arg("s2") = 1.0, py::arg("tau2") = 1.0, py::arg("rho") = 0.0);

  m.def("prior_blocks",
        [](double c, double c0, const std::string& p0, std::size_t M, std::uint64_t seed) {
          Rng rng = make_rng(seed, 0);
          const auto b = prior_blocks(hdp(c, c0, p0), M, rng);
          py::array_t<double> out({static_cast<py::ssize_t>(b.size()), py::ssize_t{4}});
          auto v = out.mutable_unchecked<2>();
          for (std::size_t t = 0; t < b.size(); ++t) {
            const auto i = static_cast<py::ssize_t>(t);
            v(i, 0) = b.x11.scalar(t);
            v(i, 1) = b.x21.scalar(t);
            v(i, 2) = b.x12.scalar(t);
            v(i, 3) = b.x22.scalar(t);
          }
          return out;
        },
        py::arg("c") = 1.0, py::arg("c0") = 1.0, py::arg("p0") = "uniform:a=0,b=1",
        py::arg("m") = 10000, py::arg("seed"));

  m.def("run_convergence",
        [](std::uint64_t seed, std::size_t datasets, std::size_t R, std::size_t M) {
          ConvergenceConfig cfg;
          cfg.seed = seed;
          cfg.analytics.R = R;
          cfg.analytics.M = M;
          const auto res = run_convergence_replicated(cfg, datasets);
          py::dict d;
          d["slopes"] = res.slopes;
          d["median_slopes"] = res.median_slopes;
          return d;
        },
        py::arg("seed"), py::arg("datasets") = 1, py::arg("r") = 1000, py::arg("m") = 10000);
}
