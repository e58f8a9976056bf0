// Command-line front end: dataset generation, training, evaluation, bound
// queries, and the two replication experiments. Exit codes: 0 success,
// 1 usage, 2 data error, 3 numerical failure. Wall-clock goes to stderr
// only; files written by a command are byte-determined by its flags.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spaceform/datagen.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/experiments.hpp"
#include "spaceform/io.hpp"
#include "spaceform/metrics.hpp"
#include "spaceform/perceptron.hpp"
#include "spaceform/search.hpp"
#include "spaceform/svm.hpp"

using namespace spaceform;

namespace {

Signature build_signature(const std::string& text,
                          const std::vector<double>& curvatures,
                          const std::vector<double>& alphas) {
  const Signature base = parse_signature(text);
  std::vector<SpaceForm> blocks = base.blocks;
  std::size_t j = 0;
  for (SpaceForm& b : blocks) {
    if (b.kind == Kind::euclidean || curvatures.empty()) continue;
    if (j == curvatures.size())
      throw ParameterError(
          "--curvature: need one value per non-Euclidean block");
    const double c = curvatures[j++];
    b = b.kind == Kind::spherical ? SpaceForm::sphere(b.dim, c)
                                  : SpaceForm::hyperbolic(b.dim, c);
  }
  if (j != curvatures.size())
    throw ParameterError("--curvature: more values than non-Euclidean blocks");
  if (alphas.empty()) return Signature(std::move(blocks));
  Vector a(Index(alphas.size()));
  for (Index i = 0; i < a.size(); ++i) a(i) = alphas[std::size_t(i)];
  return Signature(std::move(blocks), std::move(a));
}

void ensure_outdir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir);
}

double accuracy_against(const IntVector& preds, const IntVector& labels) {
  long ok = 0;
  for (Index i = 0; i < preds.size(); ++i)
    if (preds(i) == labels(i)) ++ok;
  return preds.size() ? double(ok) / double(preds.size()) : 0.0;
}

// ---------------------------------------------------------------- gen

struct GenOpts {
  std::string signature = "E2xS2xH2";
  std::vector<double> curvatures, alphas;
  long n = 100;
  double eps = 0.1, scale = 1.0;
  std::uint64_t seed = 0;
  std::string out, params_out, report;
};

int run_gen(const GenOpts& o) {
  GenConfig cfg;
  cfg.sig = build_signature(o.signature, o.curvatures, o.alphas);
  cfg.n = Index(o.n);
  cfg.epsilon = o.eps;
  cfg.seed = o.seed;
  cfg.scale = o.scale;
  const GenResult gen = generate_margin_dataset(cfg);
  save_dataset(o.out, gen.data, gen.radii);
  if (!o.params_out.empty()) save_params(o.params_out, gen.w_star);

  std::printf("signature %s\n", cfg.sig.str().c_str());
  std::printf("points %ld\n", long(gen.data.size()));
  std::printf("attempts %ld\n", gen.attempts);
  std::printf("bound %s\n", format_double(gen.theoretical_bound).c_str());
  std::printf("saturated %d\n", int(gen.precondition_saturated));
  std::printf("wrote %s\n", o.out.c_str());

  if (!o.report.empty()) {
    Report rep;
    rep.add("command", "gen");
    rep.add("signature", cfg.sig.str());
    rep.add("n", long(cfg.n));
    rep.add("eps", cfg.epsilon);
    rep.add("seed", cfg.seed);
    rep.add("scale", cfg.scale);
    rep.add("attempts", gen.attempts);
    rep.add("bound", gen.theoretical_bound);
    rep.add("saturated", int(gen.precondition_saturated));
    for (std::size_t k = 0; k < gen.radii.size(); ++k)
      rep.add("radius " + std::to_string(k), gen.radii[k]);
    for (std::size_t k = 0; k < gen.teacher_radii.size(); ++k)
      rep.add("teacher_radius " + std::to_string(k), gen.teacher_radii[k]);
    rep.add("dataset", o.out);
    rep.write(o.report);
  }
  return 0;
}

// ----------------------------------------------------- train-perceptron

struct TrainPerceptronOpts {
  std::string data, out, trace_out, report;
  long max_passes = 1000;
  bool single_pass = false;
  std::vector<double> radii;
};

int run_train_perceptron(const TrainPerceptronOpts& o) {
  const DatasetFile df = load_dataset(o.data);
  PerceptronConfig pc;
  pc.max_passes = int(o.max_passes);
  pc.single_pass = o.single_pass;
  pc.radii = o.radii.empty() ? df.radii : o.radii;
  pc.record_trace = !o.trace_out.empty();
  TrainTrace trace;
  const PerceptronModel model = train_product_perceptron(
      df.data, pc, pc.record_trace ? &trace : nullptr);
  save_perceptron(o.out, model);

  IntVector preds(df.data.size());
  for (Index i = 0; i < df.data.size(); ++i)
    preds(i) = model.predict_one(df.data.points.row(i).transpose());
  const double f1 = macro_f1(preds, df.data.labels);

  std::printf("updates %ld\n", long(model.updates.size()));
  std::printf("passes %d\n", model.passes);
  std::printf("converged %d\n", int(model.converged));
  std::printf("train_macro_f1 %s\n", format_double(f1).c_str());
  std::printf("wrote %s\n", o.out.c_str());

  if (!o.trace_out.empty()) {
    std::string csv = "update,f1\n";
    for (const auto& [k, v] : trace.f1_by_update)
      csv += std::to_string(k) + "," + format_double(v) + "\n";
    std::ofstream out(o.trace_out, std::ios::binary);
    out << csv;
    if (!out) throw DataError("cannot write " + o.trace_out);
  }
  if (!o.report.empty()) {
    Report rep;
    rep.add("command", "train-perceptron");
    rep.add("data", o.data);
    rep.add("signature", df.data.sig.str());
    rep.add("max_passes", o.max_passes);
    rep.add("single_pass", int(o.single_pass));
    rep.add("updates", long(model.updates.size()));
    rep.add("passes", model.passes);
    rep.add("converged", int(model.converged));
    rep.add("train_macro_f1", f1);
    rep.add("model", o.out);
    rep.write(o.report);
  }
  return 0;
}

// ----------------------------------------------------- train-hyperbolic

struct TrainHyperbolicOpts {
  std::string data, out, report;
  std::string rule = "convergent";
  long max_updates = 0;
};

int run_train_hyperbolic(const TrainHyperbolicOpts& o) {
  const DatasetFile df = load_dataset(o.data);
  if (df.data.sig.size() != 1 ||
      df.data.sig.blocks[0].kind != Kind::hyperbolic)
    throw DataError(
        "train-hyperbolic: dataset must be a single hyperbolic block");
  const SpaceForm form = df.data.sig.blocks[0];

  HyperbolicPerceptron model;
  long degenerate = -1;
  if (o.rule == "convergent") {
    model = train_hyperbolic_perceptron(form, df.data.points, df.data.labels,
                                        o.max_updates);
  } else {
    if (form.curvature != -1.0)
      throw ParameterError("normalized rule assumes curvature -1");
    const WeberTrainResult wr =
        train_weber(df.data.points, df.data.labels, o.max_updates);
    model.w = wr.w;
    model.updates = wr.updates;
    model.converged = wr.converged;
    degenerate = wr.degenerate_events;
  }
  save_hyperbolic(o.out, form, model);

  IntVector preds(df.data.size());
  for (Index i = 0; i < df.data.size(); ++i)
    preds(i) = model.predict_one(df.data.points.row(i).transpose());
  const double acc = accuracy_against(preds, df.data.labels);

  std::printf("rule %s\n", o.rule.c_str());
  std::printf("updates %ld\n", model.updates);
  std::printf("converged %d\n", int(model.converged));
  if (degenerate >= 0) std::printf("degenerate_events %ld\n", degenerate);
  std::printf("train_accuracy %s\n", format_double(acc).c_str());
  std::printf("wrote %s\n", o.out.c_str());

  if (!o.report.empty()) {
    Report rep;
    rep.add("command", "train-hyperbolic");
    rep.add("data", o.data);
    rep.add("rule", o.rule);
    rep.add("max_updates", o.max_updates);
    rep.add("updates", model.updates);
    rep.add("converged", int(model.converged));
    if (degenerate >= 0) rep.add("degenerate_events", degenerate);
    rep.add("train_accuracy", acc);
    rep.add("model", o.out);
    rep.write(o.report);
  }
  return 0;
}

// ----------------------------------------------------------- train-svm

struct TrainSvmOpts {
  std::string data, out, report;
  SvmParams params;
  bool relaxed = false;
};

int run_train_svm(const TrainSvmOpts& o) {
  const DatasetFile df = load_dataset(o.data);
  SvmParams params = o.params;
  params.hyperbolic_constraints = !o.relaxed;
  const KernelSet kernels = build_kernel_matrices(df.data, df.radii);
  const SvmSolution sol = solve_svm(kernels, df.data.labels, params);
  const SvmModel model = make_svm_model(df.data, kernels, sol);
  save_svm_model(o.out, model);

  IntVector preds(df.data.size());
  for (Index i = 0; i < df.data.size(); ++i)
    preds(i) = model.predict_one(df.data.points.row(i).transpose());
  const double f1 = macro_f1(preds, df.data.labels);

  std::printf("epsilon %s\n", format_double(sol.epsilon).c_str());
  std::printf("objective %s\n", format_double(sol.objective).c_str());
  std::printf("iterations %ld\n", sol.iterations);
  std::printf("converged %d\n", int(sol.converged));
  for (const auto& [name, value] : sol.residuals)
    std::printf("residual %s %s\n", name.c_str(),
                format_double(value).c_str());
  std::printf("train_macro_f1 %s\n", format_double(f1).c_str());
  std::printf("wrote %s\n", o.out.c_str());

  if (!o.report.empty()) {
    Report rep;
    rep.add("command", "train-svm");
    rep.add("data", o.data);
    rep.add("signature", df.data.sig.str());
    rep.add("r", params.r);
    rep.add("tolerance", params.tolerance);
    rep.add("max_iters", params.max_iters);
    rep.add("slack_weight", params.slack_weight);
    rep.add("hyperbolic_constraints", int(params.hyperbolic_constraints));
    rep.add("epsilon", sol.epsilon);
    rep.add("objective", sol.objective);
    rep.add("iterations", sol.iterations);
    rep.add("converged", int(sol.converged));
    for (const auto& [name, value] : sol.residuals)
      rep.add("residual " + name, value);
    rep.add("train_macro_f1", f1);
    rep.add("model", o.out);
    rep.write(o.report);
  }
  return 0;
}

// ----------------------------------------------------------------- eval

struct EvalOpts {
  std::string data, report, preds_out;
  std::string trainer = "perceptron";
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
  long max_passes = 200;
  SvmParams svm;
  bool svm_relaxed = false;
};

int run_eval(const EvalOpts& o) {
  if (!(o.train_fraction > 0 && o.train_fraction < 1))
    throw ParameterError("eval: --train-fraction must lie in (0,1)");
  const DatasetFile df = load_dataset(o.data);
  const SplitIndices split =
      split_indices(df.data.size(), o.train_fraction, o.seed);
  if (split.train.empty() || split.test.empty())
    throw DataError("eval: split produced an empty side");
  const LabeledData train = subset(df.data, split.train);
  const LabeledData test = subset(df.data, split.test);

  BinaryTrainer trainer;
  if (o.trainer == "perceptron") {
    PerceptronConfig pc;
    pc.max_passes = int(o.max_passes);
    pc.radii = df.radii;
    trainer = [pc](const LabeledData& d) {
      auto model = std::make_shared<PerceptronModel>(
          train_product_perceptron(d, pc));
      return [model](const Vector& x) { return model->decision(x); };
    };
  } else {
    SvmParams sp = o.svm;
    sp.hyperbolic_constraints = !o.svm_relaxed;
    const std::vector<double> radii = df.radii;
    trainer = [sp, radii](const LabeledData& d) {
      const KernelSet kernels = build_kernel_matrices(d, radii);
      const SvmSolution sol = solve_svm(kernels, d.labels, sp);
      auto model =
          std::make_shared<SvmModel>(make_svm_model(d, kernels, sol));
      return [model](const Vector& x) { return model->decision(x); };
    };
  }

  const OneVsRest ovr = one_vs_rest_train(train, trainer);
  const IntVector train_preds = ovr.predict(train.points);
  const IntVector test_preds = ovr.predict(test.points);
  const double train_f1 = macro_f1(train_preds, train.labels);
  const double test_f1 = macro_f1(test_preds, test.labels);
  const std::vector<ClassMetrics> per_class =
      per_class_metrics(test_preds, test.labels);

  std::printf("trainer %s\n", o.trainer.c_str());
  std::printf("classes %ld\n", long(ovr.classes.size()));
  std::printf("train_points %ld\n", long(train.size()));
  std::printf("test_points %ld\n", long(test.size()));
  for (const ClassMetrics& m : per_class)
    std::printf("class %d precision %s recall %s f1 %s\n", m.cls,
                format_double(m.precision).c_str(),
                format_double(m.recall).c_str(), format_double(m.f1).c_str());
  std::printf("train_macro_f1 %s\n", format_double(train_f1).c_str());
  std::printf("test_macro_f1 %s\n", format_double(test_f1).c_str());

  if (!o.preds_out.empty()) {
    std::string csv = "row,label,pred\n";
    for (Index i = 0; i < test.size(); ++i)
      csv += std::to_string(split.test[std::size_t(i)]) + "," +
             std::to_string(test.labels(i)) + "," +
             std::to_string(test_preds(i)) + "\n";
    std::ofstream out(o.preds_out, std::ios::binary);
    out << csv;
    if (!out) throw DataError("cannot write " + o.preds_out);
  }
  if (!o.report.empty()) {
    Report rep;
    rep.add("command", "eval");
    rep.add("data", o.data);
    rep.add("signature", df.data.sig.str());
    rep.add("trainer", o.trainer);
    rep.add("train_fraction", o.train_fraction);
    rep.add("seed", o.seed);
    rep.add("train_points", long(train.size()));
    rep.add("test_points", long(test.size()));
    for (const ClassMetrics& m : per_class)
      rep.add("class " + std::to_string(m.cls),
              "precision " + format_double(m.precision) + " recall " +
                  format_double(m.recall) + " f1 " + format_double(m.f1));
    rep.add("train_macro_f1", train_f1);
    rep.add("test_macro_f1", test_f1);
    rep.write(o.report);
  }
  return 0;
}

// ----------------------------------------------------- signature-search

struct SearchOpts {
  std::string data, report;
  long n = 300;
  double eps = 0.1, scale = 1.0;
  double threshold = 0.01;
  int max_blocks = 3;
  std::string trainer = "perceptron";
  int passes = 100;
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
  SvmParams svm;
};

int run_search(const SearchOpts& o) {
  SearchConfig cfg;
  cfg.improvement_threshold = o.threshold;
  cfg.max_blocks = o.max_blocks;
  cfg.trainer = o.trainer == "svm" ? SearchConfig::Trainer::svm
                                   : SearchConfig::Trainer::perceptron;
  cfg.perceptron_passes = o.passes;
  cfg.svm = o.svm;
  cfg.train_fraction = o.train_fraction;
  cfg.seed = o.seed;

  CandidateProvider provider;
  if (!o.data.empty())
    provider = make_slice_provider(load_dataset(o.data).data);
  else
    provider = make_regen_provider(Index(o.n), o.eps, o.scale);

  const SearchResult res = greedy_signature_search(provider, cfg);
  for (const SearchStep& s : res.trace)
    std::printf("candidate %s f1 %s%s\n", s.sig.str().c_str(),
                format_double(s.accuracy).c_str(), s.chosen ? " chosen" : "");
  std::printf("best %s\n", res.best.str().c_str());
  std::printf("best_f1 %s\n", format_double(res.best_accuracy).c_str());

  if (!o.report.empty()) {
    Report rep;
    rep.add("command", "signature-search");
    rep.add("source", o.data.empty() ? "regenerated" : o.data);
    rep.add("seed", o.seed);
    rep.add("trainer", o.trainer);
    rep.add("threshold", o.threshold);
    rep.add("max_blocks", o.max_blocks);
    for (std::size_t i = 0; i < res.trace.size(); ++i)
      rep.add("candidate " + std::to_string(i),
              res.trace[i].sig.str() + " f1 " +
                  format_double(res.trace[i].accuracy) +
                  (res.trace[i].chosen ? " chosen" : ""));
    rep.add("best", res.best.str());
    rep.add("best_f1", res.best_accuracy);
    rep.write(o.report);
  }
  return 0;
}

// --------------------------------------------------------------- bounds

struct BoundsOpts {
  std::string signature, report;
  std::vector<double> curvatures;
  int search_dim = 0;
};

int run_bounds(const BoundsOpts& o) {
  const Signature sig = build_signature(o.signature, o.curvatures, {});
  const long lower = vc_lower_bound(sig);
  const long upper = vc_upper_bound(sig);
  std::printf("signature %s\n", sig.str().c_str());
  std::printf("dim %d\n", sig.dim());
  std::printf("ambient %d\n", sig.ambient());
  std::printf("vc_lower %ld\n", lower);
  std::printf("vc_upper %ld\n", upper);
  SearchSpaceSize sizes;
  if (o.search_dim > 0) {
    sizes = signature_search_space_size(o.search_dim);
    std::printf("search_full %llu\n", sizes.full);
    std::printf("search_greedy %llu\n", sizes.greedy);
  }
  if (!o.report.empty()) {
    Report rep;
    rep.add("command", "bounds");
    rep.add("signature", sig.str());
    rep.add("dim", sig.dim());
    rep.add("ambient", sig.ambient());
    rep.add("vc_lower", lower);
    rep.add("vc_upper", upper);
    if (o.search_dim > 0) {
      rep.add("search_dim", o.search_dim);
      rep.add("search_full", std::uint64_t(sizes.full));
      rep.add("search_greedy", std::uint64_t(sizes.greedy));
    }
    rep.write(o.report);
  }
  return 0;
}

// ------------------------------------------------------------ fig5/fig7

struct Fig5Opts {
  std::string signature = "E2xS2xH2";
  std::vector<long> n_values;
  std::vector<double> eps_values;
  std::uint64_t seed = 0;
  double scale = 1.0;
  long euclid_cap = 5000;
  long max_passes = 1000;
  std::string outdir = ".";
};

int run_fig5(const Fig5Opts& o) {
  ensure_outdir(o.outdir);
  ConvergenceGridConfig cfg;
  cfg.sig = build_signature(o.signature, {}, {});
  if (!o.n_values.empty()) {
    cfg.n_values.clear();
    for (long n : o.n_values) cfg.n_values.push_back(Index(n));
  }
  if (!o.eps_values.empty()) cfg.eps_values = o.eps_values;
  cfg.seed = o.seed;
  cfg.scale = o.scale;
  cfg.euclidean_cap = o.euclid_cap;
  cfg.max_passes = int(o.max_passes);
  cfg.outdir = o.outdir;

  const ConvergenceGridResult res = run_convergence_grid(cfg);
  for (const ConvergenceCell& c : res.cells)
    std::printf(
        "cell n %ld eps %s updates %ld bound %s converged %d f1 %s "
        "euclid_updates %ld euclid_converged %d\n",
        long(c.n), format_double(c.eps).c_str(), c.product_updates,
        format_double(c.bound).c_str(), int(c.product_converged),
        format_double(c.product_final_f1).c_str(), c.euclid_updates,
        int(c.euclid_converged));
  for (const std::string& f : res.files)
    std::printf("wrote %s\n", f.c_str());
  return 0;
}

struct Fig7Opts {
  std::uint64_t seed = 0;
  long n = 5000;
  int eps_count = 100;
  double eps_min = 0.1, eps_max = 1.0, scale = 2.0;
  std::string outdir = ".";
};

int run_fig7(const Fig7Opts& o) {
  ensure_outdir(o.outdir);
  HyperbolicSweepConfig cfg;
  cfg.seed = o.seed;
  cfg.n = Index(o.n);
  cfg.eps_count = o.eps_count;
  cfg.eps_min = o.eps_min;
  cfg.eps_max = o.eps_max;
  cfg.scale = o.scale;
  cfg.outdir = o.outdir;

  const HyperbolicSweepResult res = run_hyperbolic_sweep(cfg);
  long q_total = 0, q_conv = 0, c_total = 0, c_conv = 0;
  for (const HyperbolicSweepRow& r : res.rows) {
    if (r.budget_kind == 0) {
      ++q_total;
      q_conv += r.ours_converged;
    } else {
      ++c_total;
      c_conv += r.ours_converged;
    }
  }
  std::printf("w_star_norm %s\n", format_double(res.w_star_norm).c_str());
  std::printf("quadratic_budget_converged %ld/%ld\n", q_conv, q_total);
  std::printf("claimed_budget_converged %ld/%ld\n", c_conv, c_total);
  for (const std::string& f : res.files)
    std::printf("wrote %s\n", f.c_str());
  return 0;
}

void add_svm_flags(CLI::App* cmd, SvmParams& p, const char* prefix) {
  const std::string pre(prefix);
  cmd->add_option(pre + "r", p.r,
                  "hyperbolic constraint radius; negative picks the "
                  "per-block default");
  cmd->add_option(pre + "tolerance", p.tolerance, "solver tolerance");
  cmd->add_option(pre + "max-iters", p.max_iters, "solver iteration cap");
  cmd->add_option(pre + "slack-weight", p.slack_weight,
                  "weight on total slack in the objective");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear classifiers on products of space forms"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  GenOpts gen_o;
  CLI::App* cmd_gen =
      app.add_subcommand("gen", "generate a margin-separated dataset");
  cmd_gen->add_option("--signature", gen_o.signature,
                      "product signature, e.g. E2xS2xH2");
  cmd_gen->add_option("--curvature", gen_o.curvatures,
                      "curvature per non-Euclidean block, in order");
  cmd_gen->add_option("--alpha", gen_o.alphas, "metric weight per block");
  cmd_gen->add_option("--n", gen_o.n, "number of points");
  cmd_gen->add_option("--eps", gen_o.eps, "margin all points must clear");
  cmd_gen->add_option("--seed", gen_o.seed, "RNG seed")->required();
  cmd_gen->add_option("--scale", gen_o.scale, "Gaussian scale before lift");
  cmd_gen->add_option("--out", gen_o.out, "dataset path")->required();
  cmd_gen->add_option("--params-out", gen_o.params_out,
                      "also save the teacher parameters");
  cmd_gen->add_option("--report", gen_o.report, "write a report file");

  TrainPerceptronOpts tp_o;
  CLI::App* cmd_tp = app.add_subcommand(
      "train-perceptron", "train the product-kernel perceptron");
  cmd_tp->add_option("--data", tp_o.data, "dataset path")->required();
  cmd_tp->add_option("--out", tp_o.out, "model path")->required();
  cmd_tp->add_option("--max-passes", tp_o.max_passes, "pass cap");
  cmd_tp->add_flag("--single-pass", tp_o.single_pass,
                   "streaming mode: exactly one pass");
  cmd_tp->add_option("--radius", tp_o.radii,
                     "norm bound per hyperbolic block (default: from data)");
  cmd_tp->add_option("--trace-out", tp_o.trace_out,
                     "write the F1-vs-update curve as CSV");
  cmd_tp->add_option("--report", tp_o.report, "write a report file");

  TrainHyperbolicOpts th_o;
  CLI::App* cmd_th = app.add_subcommand(
      "train-hyperbolic", "train a single-block hyperbolic perceptron");
  cmd_th->add_option("--data", th_o.data, "dataset path")->required();
  cmd_th->add_option("--out", th_o.out, "model path")->required();
  cmd_th->add_option("--rule", th_o.rule, "update rule")
      ->check(CLI::IsMember({"convergent", "normalized"}));
  cmd_th->add_option("--max-updates", th_o.max_updates,
                     "update budget; 0 means uncapped");
  cmd_th->add_option("--report", th_o.report, "write a report file");

  TrainSvmOpts ts_o;
  CLI::App* cmd_ts =
      app.add_subcommand("train-svm", "solve the relaxed large-margin program");
  cmd_ts->add_option("--data", ts_o.data, "dataset path")->required();
  cmd_ts->add_option("--out", ts_o.out, "model path")->required();
  add_svm_flags(cmd_ts, ts_o.params, "--");
  cmd_ts->add_flag("--relaxed", ts_o.relaxed,
                   "drop the hyperbolic constraint pair");
  cmd_ts->add_option("--report", ts_o.report, "write a report file");

  EvalOpts ev_o;
  CLI::App* cmd_ev = app.add_subcommand(
      "eval", "one-vs-rest evaluation with Platt-scaled probabilities");
  cmd_ev->add_option("--data", ev_o.data, "dataset path")->required();
  cmd_ev->add_option("--trainer", ev_o.trainer, "binary trainer")
      ->check(CLI::IsMember({"perceptron", "svm"}));
  cmd_ev->add_option("--train-fraction", ev_o.train_fraction,
                     "train share of the seeded shuffle split");
  cmd_ev->add_option("--seed", ev_o.seed, "split seed")->required();
  cmd_ev->add_option("--max-passes", ev_o.max_passes,
                     "perceptron pass cap per class");
  add_svm_flags(cmd_ev, ev_o.svm, "--svm-");
  cmd_ev->add_flag("--svm-relaxed", ev_o.svm_relaxed,
                   "drop the hyperbolic constraint pair");
  cmd_ev->add_option("--preds-out", ev_o.preds_out,
                     "write test predictions as CSV");
  cmd_ev->add_option("--report", ev_o.report, "write a report file");

  SearchOpts se_o;
  CLI::App* cmd_se = app.add_subcommand(
      "signature-search", "greedy bottom-up search over block signatures");
  cmd_se->add_option("--data", se_o.data,
                     "slice candidate blocks out of this dataset; omitted "
                     "means regenerate per candidate");
  cmd_se->add_option("--n", se_o.n, "points per regenerated candidate");
  cmd_se->add_option("--eps", se_o.eps, "margin for regenerated candidates");
  cmd_se->add_option("--scale", se_o.scale, "generation scale");
  cmd_se->add_option("--threshold", se_o.threshold,
                     "minimum F1 improvement to keep growing");
  cmd_se->add_option("--max-blocks", se_o.max_blocks, "block cap");
  cmd_se->add_option("--trainer", se_o.trainer, "candidate trainer")
      ->check(CLI::IsMember({"perceptron", "svm"}));
  cmd_se->add_option("--passes", se_o.passes, "perceptron pass cap");
  cmd_se->add_option("--train-fraction", se_o.train_fraction,
                     "train share of each candidate split");
  cmd_se->add_option("--seed", se_o.seed, "seed")->required();
  add_svm_flags(cmd_se, se_o.svm, "--svm-");
  cmd_se->add_option("--report", se_o.report, "write a report file");

  BoundsOpts bo_o;
  CLI::App* cmd_bo = app.add_subcommand(
      "bounds", "shattering bounds and search-space sizes");
  cmd_bo->add_option("--signature", bo_o.signature, "product signature")
      ->required();
  cmd_bo->add_option("--curvature", bo_o.curvatures,
                     "curvature per non-Euclidean block, in order");
  cmd_bo->add_option("--search-dim", bo_o.search_dim,
                     "also print candidate-space sizes for this even "
                     "embedding dimension");
  cmd_bo->add_option("--report", bo_o.report, "write a report file");

  Fig5Opts f5_o;
  CLI::App* cmd_f5 = app.add_subcommand(
      "fig5", "convergence grid: product perceptron vs flattened baseline");
  cmd_f5->add_option("--signature", f5_o.signature, "product signature");
  cmd_f5->add_option("--n", f5_o.n_values,
                     "dataset sizes (default 100 200 300)");
  cmd_f5->add_option("--eps", f5_o.eps_values,
                     "margins (default 0.01 0.05 0.1 0.2)");
  cmd_f5->add_option("--seed", f5_o.seed, "base seed")->required();
  cmd_f5->add_option("--scale", f5_o.scale, "generation scale");
  cmd_f5->add_option("--euclid-cap", f5_o.euclid_cap,
                     "update cap for the flattened baseline");
  cmd_f5->add_option("--max-passes", f5_o.max_passes,
                     "pass cap for the product perceptron");
  cmd_f5->add_option("--outdir", f5_o.outdir, "output directory");

  Fig7Opts f7_o;
  CLI::App* cmd_f7 = app.add_subcommand(
      "fig7", "hyperbolic margin sweep: convergent vs normalized rule");
  cmd_f7->add_option("--seed", f7_o.seed, "seed")->required();
  cmd_f7->add_option("--n", f7_o.n, "base pool size");
  cmd_f7->add_option("--eps-count", f7_o.eps_count, "margin grid size");
  cmd_f7->add_option("--eps-min", f7_o.eps_min, "smallest margin");
  cmd_f7->add_option("--eps-max", f7_o.eps_max, "largest margin");
  cmd_f7->add_option("--scale", f7_o.scale, "tangent Gaussian scale");
  cmd_f7->add_option("--outdir", f7_o.outdir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    if (*cmd_gen) rc = run_gen(gen_o);
    else if (*cmd_tp) rc = run_train_perceptron(tp_o);
    else if (*cmd_th) rc = run_train_hyperbolic(th_o);
    else if (*cmd_ts) rc = run_train_svm(ts_o);
    else if (*cmd_ev) rc = run_eval(ev_o);
    else if (*cmd_se) rc = run_search(se_o);
    else if (*cmd_bo) rc = run_bounds(bo_o);
    else if (*cmd_f5) rc = run_fig5(f5_o);
    else if (*cmd_f7) rc = run_fig7(f7_o);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const GenerationStallError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  std::fprintf(stderr, "[time] %.3f s\n", dt.count());
  return rc;
}
