#include "spaceform/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "spaceform/errors.hpp"
#include "spaceform/io.hpp"

namespace spaceform {
namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw DataError("cannot write " + path);
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::string fnum(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Minimal line-chart SVG emitter. Coordinates are printed with fixed
// precision so identical inputs give identical bytes.
struct Series {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> pts;
};

struct Chart {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  double vline = std::numeric_limits<double>::quiet_NaN();
  std::string vline_label;
  bool logx = false;  // x mapped through log10(1 + x)
  double ymin = 0, ymax = 1;
};

constexpr double kW = 320, kH = 250;
constexpr double kL = 46, kR = 12, kT = 26, kB = 38;

double xmap(const Chart& c, double v) {
  return c.logx ? std::log10(1.0 + std::max(0.0, v)) : v;
}

void render_chart(std::string& out, const Chart& c) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  for (const Series& s : c.series)
    for (const auto& p : s.pts) {
      xlo = std::min(xlo, xmap(c, p.first));
      xhi = std::max(xhi, xmap(c, p.first));
    }
  if (std::isfinite(c.vline)) {
    xlo = std::min(xlo, xmap(c, c.vline));
    xhi = std::max(xhi, xmap(c, c.vline));
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1;
  if (xhi - xlo < 1e-12) xhi = xlo + 1;
  const double iw = kW - kL - kR, ih = kH - kT - kB;
  auto px = [&](double v) { return kL + (xmap(c, v) - xlo) / (xhi - xlo) * iw; };
  auto py = [&](double v) {
    return kT + (c.ymax - v) / (c.ymax - c.ymin) * ih;
  };

  out += "<rect x=\"" + fnum("%.1f", kL) + "\" y=\"" + fnum("%.1f", kT) +
         "\" width=\"" + fnum("%.1f", iw) + "\" height=\"" +
         fnum("%.1f", ih) +
         "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  out += "<text x=\"" + fnum("%.1f", kW / 2) +
         "\" y=\"15\" text-anchor=\"middle\" font-size=\"12\">" + c.title +
         "</text>\n";
  out += "<text x=\"" + fnum("%.1f", kL + iw / 2) + "\" y=\"" +
         fnum("%.1f", kH - 8) +
         "\" text-anchor=\"middle\" font-size=\"10\">" + c.xlabel +
         "</text>\n";
  out += "<text x=\"12\" y=\"" + fnum("%.1f", kT + ih / 2) +
         "\" text-anchor=\"middle\" font-size=\"10\" transform=\"rotate(-90 "
         "12 " +
         fnum("%.1f", kT + ih / 2) + ")\">" + c.ylabel + "</text>\n";

  // y ticks: quarters of the fixed range
  for (int i = 0; i <= 4; ++i) {
    const double v = c.ymin + (c.ymax - c.ymin) * i / 4.0;
    const double y = py(v);
    out += "<line x1=\"" + fnum("%.1f", kL - 3) + "\" y1=\"" +
           fnum("%.1f", y) + "\" x2=\"" + fnum("%.1f", kL) + "\" y2=\"" +
           fnum("%.1f", y) + "\" stroke=\"#888888\"/>\n";
    out += "<text x=\"" + fnum("%.1f", kL - 5) + "\" y=\"" +
           fnum("%.1f", y + 3) +
           "\" text-anchor=\"end\" font-size=\"9\">" + fnum("%.3g", v) +
           "</text>\n";
  }
  // x ticks: decades under the log map, even spacing otherwise
  std::vector<double> ticks;
  if (c.logx) {
    ticks.push_back(0);
    for (double v = 10; xmap(c, v) <= xhi * (1 + 1e-9); v *= 10)
      ticks.push_back(v);
  } else {
    for (int i = 0; i <= 4; ++i) ticks.push_back(xlo + (xhi - xlo) * i / 4.0);
  }
  for (double v : ticks) {
    const double x = c.logx ? px(v) : kL + (v - xlo) / (xhi - xlo) * iw;
    out += "<line x1=\"" + fnum("%.1f", x) + "\" y1=\"" +
           fnum("%.1f", kT + ih) + "\" x2=\"" + fnum("%.1f", x) +
           "\" y2=\"" + fnum("%.1f", kT + ih + 3) +
           "\" stroke=\"#888888\"/>\n";
    out += "<text x=\"" + fnum("%.1f", x) + "\" y=\"" +
           fnum("%.1f", kT + ih + 13) +
           "\" text-anchor=\"middle\" font-size=\"9\">" + fnum("%.3g", v) +
           "</text>\n";
  }

  if (std::isfinite(c.vline)) {
    const double x = px(c.vline);
    out += "<line x1=\"" + fnum("%.1f", x) + "\" y1=\"" + fnum("%.1f", kT) +
           "\" x2=\"" + fnum("%.1f", x) + "\" y2=\"" + fnum("%.1f", kT + ih) +
           "\" stroke=\"#1e8449\" stroke-width=\"1\" "
           "stroke-dasharray=\"4 3\"/>\n";
  }

  int li = 0;
  for (const Series& s : c.series) {
    // Thin long polylines; the CSVs keep every sample.
    std::vector<std::pair<double, double>> pts;
    if (s.pts.size() > 512) {
      const std::size_t stride = (s.pts.size() + 511) / 512;
      for (std::size_t i = 0; i < s.pts.size(); i += stride)
        pts.push_back(s.pts[i]);
      if (pts.back() != s.pts.back()) pts.push_back(s.pts.back());
    } else {
      pts = s.pts;
    }
    out += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\"";
    if (s.dashed) out += " stroke-dasharray=\"5 3\"";
    out += " points=\"";
    for (const auto& p : pts)
      out += fnum("%.2f", px(p.first)) + "," +
             fnum("%.2f", py(std::clamp(p.second, c.ymin, c.ymax))) + " ";
    out += "\"/>\n";
    const double ly = kT + 12 + 13 * li++;
    out += "<line x1=\"" + fnum("%.1f", kL + 8) + "\" y1=\"" +
           fnum("%.1f", ly - 3) + "\" x2=\"" + fnum("%.1f", kL + 26) +
           "\" y2=\"" + fnum("%.1f", ly - 3) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"5 3\"" : "") + "/>\n";
    out += "<text x=\"" + fnum("%.1f", kL + 30) + "\" y=\"" +
           fnum("%.1f", ly) + "\" font-size=\"9\">" + s.label + "</text>\n";
  }
  if (std::isfinite(c.vline) && !c.vline_label.empty()) {
    const double ly = kT + 12 + 13 * li;
    out += "<line x1=\"" + fnum("%.1f", kL + 8) + "\" y1=\"" +
           fnum("%.1f", ly - 3) + "\" x2=\"" + fnum("%.1f", kL + 26) +
           "\" y2=\"" + fnum("%.1f", ly - 3) +
           "\" stroke=\"#1e8449\" stroke-dasharray=\"4 3\"/>\n";
    out += "<text x=\"" + fnum("%.1f", kL + 30) + "\" y=\"" +
           fnum("%.1f", ly) + "\" font-size=\"9\">" + c.vline_label +
           "</text>\n";
  }
}

std::string render_grid(const std::vector<Chart>& charts, int cols) {
  const int rows = (int(charts.size()) + cols - 1) / cols;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(int(kW) * cols) + "\" height=\"" +
                    std::to_string(int(kH) * rows) +
                    "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < charts.size(); ++i) {
    const int r = int(i) / cols, c = int(i) % cols;
    out += "<g transform=\"translate(" + std::to_string(c * int(kW)) + " " +
           std::to_string(r * int(kH)) + ")\">\n";
    render_chart(out, charts[i]);
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

const char* yn(bool b) { return b ? "1" : "0"; }

// Runs fn(i) for i in [0, count) across threads. Cells are independent and
// seeded individually, and results land at their own index, so the output
// does not depend on scheduling.
void parallel_cells(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = unsigned(std::min<std::size_t>(hw, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ConvergenceGridResult run_convergence_grid(const ConvergenceGridConfig& cfg) {
  if (cfg.n_values.empty() || cfg.eps_values.empty())
    throw ParameterError("convergence grid: empty n or eps grid");
  for (Index n : cfg.n_values)
    if (n < 1) throw ParameterError("convergence grid: n < 1");
  for (double e : cfg.eps_values)
    if (!(e > 0)) throw ParameterError("convergence grid: eps <= 0");
  if (cfg.max_passes < 1 || cfg.euclidean_cap < 1)
    throw ParameterError("convergence grid: passes and cap must be >= 1");

  ConvergenceGridResult result;
  std::uint64_t idx = 0;
  for (Index n : cfg.n_values)
    for (double eps : cfg.eps_values) {
      ConvergenceCell cell;
      cell.n = n;
      cell.eps = eps;
      cell.cell_seed = cfg.seed + 1000003ULL * idx++;
      result.cells.push_back(cell);
    }

  parallel_cells(result.cells.size(), [&](std::size_t i) {
    ConvergenceCell& cell = result.cells[i];
    GenConfig g;
    g.sig = cfg.sig;
    g.n = cell.n;
    g.epsilon = cell.eps;
    g.seed = cell.cell_seed;
    g.scale = cfg.scale;
    const GenResult gen = generate_margin_dataset(g);
    cell.attempts = gen.attempts;
    cell.bound = gen.theoretical_bound;

    PerceptronConfig pc;
    pc.max_passes = cfg.max_passes;
    pc.record_trace = true;
    TrainTrace ptrace;
    const PerceptronModel pm = train_product_perceptron(gen.data, pc, &ptrace);
    cell.product_updates = long(pm.updates.size());
    cell.product_converged = pm.converged;
    cell.product_curve = std::move(ptrace.f1_by_update);
    cell.product_final_f1 = cell.product_curve.back().second;

    const LabeledData flat = flatten_euclidean(gen.data);
    TrainTrace etrace;
    const EuclideanPerceptron em = train_euclidean_perceptron(
        flat.points, flat.labels, cfg.euclidean_cap, &etrace);
    cell.euclid_updates = em.updates;
    cell.euclid_converged = em.converged;
    cell.euclid_curve = std::move(etrace.f1_by_update);
    cell.euclid_final_f1 = cell.euclid_curve.back().second;
  });

  std::string curves = "n,eps,series,update,f1\n";
  for (const ConvergenceCell& c : result.cells) {
    const std::string prefix =
        std::to_string(c.n) + "," + format_double(c.eps) + ",";
    for (const auto& [k, f] : c.product_curve)
      curves += prefix + "product," + std::to_string(k) + "," +
                format_double(f) + "\n";
    for (const auto& [k, f] : c.euclid_curve)
      curves += prefix + "euclidean," + std::to_string(k) + "," +
                format_double(f) + "\n";
  }

  std::string summary =
      "n,eps,cell_seed,attempts,bound,product_updates,product_converged,"
      "product_final_f1,euclid_updates,euclid_converged,euclid_final_f1\n";
  for (const ConvergenceCell& c : result.cells)
    summary += std::to_string(c.n) + "," + format_double(c.eps) + "," +
               std::to_string(c.cell_seed) + "," + std::to_string(c.attempts) +
               "," + format_double(c.bound) + "," +
               std::to_string(c.product_updates) + "," +
               yn(c.product_converged) + "," +
               format_double(c.product_final_f1) + "," +
               std::to_string(c.euclid_updates) + "," +
               yn(c.euclid_converged) + "," +
               format_double(c.euclid_final_f1) + "\n";

  std::vector<Chart> charts;
  for (const ConvergenceCell& c : result.cells) {
    Chart ch;
    ch.title = "n=" + std::to_string(c.n) + " eps=" + fnum("%g", c.eps);
    ch.xlabel = "updates";
    ch.ylabel = "macro F1";
    ch.logx = true;
    ch.vline = c.bound;
    ch.vline_label = "update bound";
    Series sp{"product", "#c0392b", false, {}};
    for (const auto& [k, f] : c.product_curve)
      sp.pts.emplace_back(double(k), f);
    Series se{"flat ambient", "#2874a6", false, {}};
    for (const auto& [k, f] : c.euclid_curve)
      se.pts.emplace_back(double(k), f);
    ch.series = {std::move(sp), std::move(se)};
    charts.push_back(std::move(ch));
  }

  Report rep;
  rep.add("experiment", "convergence-grid");
  rep.add("signature", cfg.sig.str());
  rep.add("seed", cfg.seed);
  rep.add("scale", cfg.scale);
  rep.add("max_passes", cfg.max_passes);
  rep.add("euclidean_cap", cfg.euclidean_cap);
  rep.add("cells", long(result.cells.size()));
  for (const ConvergenceCell& c : result.cells)
    rep.add("cell n=" + std::to_string(c.n) + " eps=" + format_double(c.eps),
            "seed " + std::to_string(c.cell_seed) + " attempts " +
                std::to_string(c.attempts) + " bound " +
                format_double(c.bound) + " product_updates " +
                std::to_string(c.product_updates) + " product_converged " +
                yn(c.product_converged) + " product_f1 " +
                format_double(c.product_final_f1) + " euclid_updates " +
                std::to_string(c.euclid_updates) + " euclid_converged " +
                yn(c.euclid_converged) + " euclid_f1 " +
                format_double(c.euclid_final_f1));

  const std::string curves_path = join_path(cfg.outdir, "fig5_curves.csv");
  const std::string summary_path = join_path(cfg.outdir, "fig5_summary.csv");
  const std::string svg_path = join_path(cfg.outdir, "fig5.svg");
  const std::string report_path = join_path(cfg.outdir, "fig5_report.txt");
  write_text(curves_path, curves);
  write_text(summary_path, summary);
  write_text(svg_path, render_grid(charts, int(cfg.eps_values.size())));
  rep.write(report_path);
  result.files = {curves_path, summary_path, svg_path, report_path};
  return result;
}

HyperbolicSweepResult run_hyperbolic_sweep(const HyperbolicSweepConfig& cfg) {
  if (cfg.n < 1) throw ParameterError("hyperbolic sweep: n < 1");
  if (cfg.eps_count < 1) throw ParameterError("hyperbolic sweep: empty grid");
  if (!(cfg.eps_min > 0) || !(cfg.eps_max >= cfg.eps_min))
    throw ParameterError("hyperbolic sweep: need 0 < eps_min <= eps_max");
  if (!(cfg.scale > 0)) throw ParameterError("hyperbolic sweep: scale <= 0");

  const SpaceForm form = SpaceForm::hyperbolic(2, -1.0);
  const Signature hsig{std::vector<SpaceForm>{form}};
  const ClassifierParams teacher = sample_w_star(hsig, cfg.seed);
  const Vector w = teacher.weights[0];

  HyperbolicSweepResult result;
  result.w_star_norm = w.norm();

  // One base sample per run; every margin level decimates the same pool.
  Rng rng(cfg.seed + 1);
  Matrix pts(cfg.n, 3);
  Vector margins(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) {
    pts.row(i) =
        lift_to_hyperboloid(rng.normal_vector(2, cfg.scale), -1.0).transpose();
    margins(i) = lorentz_product(w, pts.row(i).transpose());
  }

  result.rows.resize(2 * std::size_t(cfg.eps_count));
  parallel_cells(std::size_t(cfg.eps_count), [&](std::size_t j) {
    const double eps =
        cfg.eps_count == 1
            ? cfg.eps_min
            : cfg.eps_min + (cfg.eps_max - cfg.eps_min) * double(j) /
                                double(cfg.eps_count - 1);
    const double cut = std::sinh(eps);
    std::vector<Index> keep;
    for (Index i = 0; i < cfg.n; ++i)
      if (std::abs(margins(i)) >= cut) keep.push_back(i);

    if (keep.empty()) {
      // Flag rather than fail: nothing survived this margin level.
      for (int kind = 0; kind < 2; ++kind) {
        HyperbolicSweepRow row;
        row.budget_kind = kind;
        row.eps = eps;
        result.rows[2 * j + std::size_t(kind)] = row;
      }
      return;
    }

    Matrix dp(Index(keep.size()), 3);
    IntVector dl(Index(keep.size()));
    double radius = 0;
    for (Index t = 0; t < Index(keep.size()); ++t) {
      dp.row(t) = pts.row(keep[std::size_t(t)]);
      dl(t) = margins(keep[std::size_t(t)]) > 0 ? 1 : -1;
      radius = std::max(radius, dp.row(t).norm());
    }
    const double base = radius * result.w_star_norm / cut;

    for (int kind = 0; kind < 2; ++kind) {
      HyperbolicSweepRow row;
      row.budget_kind = kind;
      row.eps = eps;
      row.n_points = Index(keep.size());
      row.budget = long(std::ceil(kind == 0 ? base * base : base));

      const HyperbolicPerceptron hp =
          train_hyperbolic_perceptron(form, dp, dl, row.budget);
      row.ours_updates = hp.updates;
      row.ours_converged = hp.converged;
      const WeberTrainResult wr = train_weber(dp, dl, row.budget);
      row.weber_updates = wr.updates;
      row.weber_converged = wr.converged;
      row.weber_degenerate_events = wr.degenerate_events;

      long ours_ok = 0, weber_ok = 0;
      for (Index t = 0; t < dp.rows(); ++t) {
        const Vector x = dp.row(t).transpose();
        if (hp.predict_one(x) == dl(t)) ++ours_ok;
        if (wr.predict_one(x) == dl(t)) ++weber_ok;
      }
      row.ours_accuracy = double(ours_ok) / double(dp.rows());
      row.weber_accuracy = double(weber_ok) / double(dp.rows());
      result.rows[2 * j + std::size_t(kind)] = row;
    }
  });

  std::string csv =
      "budget,eps,n_points,bound,ours_updates,ours_converged,ours_accuracy,"
      "weber_updates,weber_converged,weber_degenerate,weber_accuracy\n";
  for (const HyperbolicSweepRow& r : result.rows)
    csv += std::string(r.budget_kind == 0 ? "quadratic" : "claimed") + "," +
           format_double(r.eps) + "," + std::to_string(r.n_points) + "," +
           std::to_string(r.budget) + "," + std::to_string(r.ours_updates) +
           "," + yn(r.ours_converged) + "," + format_double(r.ours_accuracy) +
           "," + std::to_string(r.weber_updates) + "," +
           yn(r.weber_converged) + "," +
           std::to_string(r.weber_degenerate_events) + "," +
           format_double(r.weber_accuracy) + "\n";

  std::vector<Chart> charts;
  for (int kind = 0; kind < 2; ++kind) {
    Chart ch;
    ch.title = kind == 0 ? "quadratic update budget" : "claimed 1/sinh budget";
    ch.xlabel = "margin eps";
    ch.ylabel = "accuracy";
    Series ours{"convergent rule", "#c0392b", false, {}};
    Series weber{"normalized rule", "#2874a6", false, {}};
    for (const HyperbolicSweepRow& r : result.rows)
      if (r.budget_kind == kind) {
        ours.pts.emplace_back(r.eps, r.ours_accuracy);
        weber.pts.emplace_back(r.eps, r.weber_accuracy);
      }
    ch.series = {std::move(ours), std::move(weber)};
    charts.push_back(std::move(ch));
  }

  Report rep;
  rep.add("experiment", "hyperbolic-sweep");
  rep.add("seed", cfg.seed);
  rep.add("n", long(cfg.n));
  rep.add("eps_count", cfg.eps_count);
  rep.add("eps_min", cfg.eps_min);
  rep.add("eps_max", cfg.eps_max);
  rep.add("scale", cfg.scale);
  rep.add("w_star_norm", result.w_star_norm);
  rep.add("rows", long(result.rows.size()));
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const HyperbolicSweepRow& r = result.rows[i];
    rep.add("row " + std::to_string(i),
            std::string(r.budget_kind == 0 ? "quadratic" : "claimed") +
                " eps " + format_double(r.eps) + " n_points " +
                std::to_string(r.n_points) + " budget " +
                std::to_string(r.budget) + " ours_updates " +
                std::to_string(r.ours_updates) + " ours_converged " +
                yn(r.ours_converged) + " ours_accuracy " +
                format_double(r.ours_accuracy) + " weber_updates " +
                std::to_string(r.weber_updates) + " weber_converged " +
                yn(r.weber_converged) + " weber_degenerate " +
                std::to_string(r.weber_degenerate_events) +
                " weber_accuracy " + format_double(r.weber_accuracy));
  }

  const std::string csv_path = join_path(cfg.outdir, "fig7_results.csv");
  const std::string svg_path = join_path(cfg.outdir, "fig7.svg");
  const std::string report_path = join_path(cfg.outdir, "fig7_report.txt");
  write_text(csv_path, csv);
  write_text(svg_path, render_grid(charts, 2));
  rep.write(report_path);
  result.files = {csv_path, svg_path, report_path};
  return result;
}

}  // namespace spaceform
