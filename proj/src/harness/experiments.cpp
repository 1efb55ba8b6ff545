#include "ndn/harness/experiments.hpp"

#include <cmath>
#include <random>

#include "ndn/harness/pipeline.hpp"

namespace ndn::harness {

using nlohmann::json;

namespace {

std::span<const Layout> cap(std::span<const Layout> test, int max_designs) {
  if (test.empty()) throw ValidationError("evaluation needs at least one test layout");
  if (max_designs > 0 && static_cast<size_t>(max_designs) < test.size()) return test.first(static_cast<size_t>(max_designs));
  return test;
}

bool has_classifier(const ModelBundle& bundle) { return bundle.classifier && bundle.classifier->trained(); }

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

json to_json(const TrialSummary& s) {
  json trials = json::array();
  for (const auto& t : s.trials) trials.push_back(eval::to_json(t));
  json out = eval::to_json(s.mean);
  out["trials"] = trials;
  out["std"] = {{"fid", s.fid_std ? json(*s.fid_std) : json(nullptr)},
                {"alignment", s.alignment_std},
                {"consistency", s.consistency_std}};
  return out;
}

TrialSummary evaluate_checkpoint(const ModelBundle& bundle, std::span<const Layout> test_all,
                                 const EvalOptions& options) {
  if (options.trials < 1) throw ValidationError("trials: must be at least 1");
  if (options.samples_per_design < 1) throw ValidationError("samples: must be at least 1");
  const auto test = cap(test_all, options.max_designs);
  const bool want_fid = has_classifier(bundle);

  std::vector<BoundingBox> loo_pred, loo_truth;
  if (options.leave_one_out) {
    for (const Layout& l : test) {
      for (int i = 0; i < l.size(); ++i) {
        loo_pred.push_back(bundle.boxgen->leave_one_out_predict(l, i));
        loo_truth.push_back(l.components[static_cast<size_t>(i)].box);
      }
    }
  }

  TrialSummary s;
  std::mt19937_64 seeds(options.seed);
  for (int t = 0; t < options.trials; ++t) {
    eval::EvaluationInput in;
    in.references.assign(test.begin(), test.end());
    in.loo_predicted = loo_pred;
    in.loo_truth = loo_truth;
    for (const Layout& l : test) {
      GenerateOptions g;
      g.samples = options.samples_per_design;
      g.seed = seeds();
      g.refine = options.refine;
      g.canvas_width = l.canvas_width;
      g.canvas_height = l.canvas_height;
      auto res = generate_layouts(bundle, graph_from_layout(l), g);
      for (size_t k = 0; k < res.layouts.size(); ++k) {
        in.generated.push_back(std::move(res.layouts[k]));
        in.constraints.push_back(std::move(res.graphs[k]));
      }
    }
    auto report = eval::evaluate_generation(in, bundle.classifier.get(), want_fid);
    report.config = {{"trial", t}, {"samples_per_design", options.samples_per_design}, {"refine", options.refine}};
    s.trials.push_back(std::move(report));
  }

  std::vector<double> fids, aligns, cons;
  for (const auto& r : s.trials) {
    if (r.fid) fids.push_back(*r.fid);
    aligns.push_back(r.alignment);
    cons.push_back(r.consistency);
  }
  s.mean = s.trials.front();
  s.mean.alignment = mean_of(aligns);
  s.mean.consistency = mean_of(cons);
  if (!fids.empty()) {
    s.mean.fid = mean_of(fids);
    s.fid_std = stddev(fids);
  }
  s.alignment_std = stddev(aligns);
  s.consistency_std = stddev(cons);
  s.mean.config = {{"trials", options.trials},
                   {"samples_per_design", options.samples_per_design},
                   {"designs", test.size()},
                   {"refine", options.refine},
                   {"seed", options.seed}};
  return s;
}

std::vector<ConstraintMix> ablation_rows() {
  return {
      {0, 0, 0, 0, true},          {20, 20, 0, 0, true},        {0, 0, 20, 20, true},
      {20, 20, 20, 20, false},     {20, 20, 20, 20, true},      {100, 100, 100, 100, false},
      {100, 100, 100, 100, true},
  };
}

json to_json(const AblationResult& r) {
  return {{"unary_size", r.mix.unary_size},
          {"binary_size", r.mix.binary_size},
          {"unary_location", r.mix.unary_location},
          {"binary_location", r.mix.binary_location},
          {"refine", r.mix.refine},
          {"fid", r.fid ? json(*r.fid) : json(nullptr)},
          {"alignment", r.alignment},
          {"consistency_to_truth", r.consistency_to_truth},
          {"consistency_to_given", r.consistency_to_given},
          {"gap", r.gap()}};
}

AblationResult run_ablation_row(const ModelBundle& bundle, std::span<const Layout> test, const ConstraintMix& mix,
                                int samples_per_design, std::uint64_t seed) {
  if (test.empty()) throw ValidationError("ablation needs at least one test layout");
  for (int p : {mix.unary_size, mix.binary_size, mix.unary_location, mix.binary_location}) {
    if (p < 0 || p > 100) throw ValidationError("ablation: percentages must lie in [0, 100]");
  }
  const data::DropRates rates{1.0 - mix.unary_location / 100.0, 1.0 - mix.binary_location / 100.0,
                              1.0 - mix.unary_size / 100.0, 1.0 - mix.binary_size / 100.0};
  std::mt19937_64 seeds(seed);
  std::vector<Layout> generated;
  double to_truth = 0.0;
  double to_given = 0.0;
  for (const Layout& l : test) {
    const LayoutGraph truth = graph_from_layout(l);
    const LayoutGraph given = data::sample_partial(truth, rates, seeds());
    GenerateOptions g;
    g.samples = samples_per_design;
    g.seed = seeds();
    g.refine = mix.refine;
    auto res = generate_layouts(bundle, given, g);
    for (Layout& out : res.layouts) {
      to_truth += check_consistency(truth, out);
      to_given += check_consistency(given, out);
      generated.push_back(std::move(out));
    }
  }
  AblationResult r;
  r.mix = mix;
  const auto count = static_cast<double>(generated.size());
  r.consistency_to_truth = to_truth / count;
  r.consistency_to_given = to_given / count;
  r.alignment = eval::alignment_score(generated);
  if (has_classifier(bundle)) {
    r.fid = eval::fid(bundle.classifier->features(test), bundle.classifier->features(generated));
  }
  return r;
}

}  // namespace ndn::harness
