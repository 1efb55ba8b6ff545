#include "ndn/harness/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "ndn/core/io.hpp"
#include "ndn/data/data.hpp"
#include "ndn/harness/experiments.hpp"
#include "ndn/harness/pipeline.hpp"
#include "ndn/harness/service.hpp"
#include "ndn/harness/training.hpp"

namespace ndn::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve_checkpoint(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kCheckpointEnv); env != nullptr && *env != '\0') return env;
  throw ValidationError(std::string("--checkpoint is required (or set ") + kCheckpointEnv + ")");
}

json read_json_file(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ValidationError(e.what());
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

LayoutGraph read_constraints(const std::string& path, const ModelBundle& bundle) {
  const ConstraintSet cs = constraints_from_json(read_json_file(path), bundle.categories);
  require_same_table(bundle, cs.categories);
  return cs.graph;
}

Layout read_layout(const std::string& path, const CategoryTable& table) {
  Layout l = layout_from_json(read_json_file(path), table);
  validate(l, table);
  return l;
}

std::pair<int, std::pair<double, double>> parse_fixed_size(const std::string& spec) {
  int index = 0;
  double w = 0.0, h = 0.0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%d:%lf:%lf%c", &index, &w, &h, &tail) != 3) {
    throw ValidationError("--fixed-size: expected INDEX:W:H, got \"" + spec + "\"");
  }
  return {index, {w, h}};
}

struct Options {
  std::uint64_t seed = 0;
  std::string checkpoint;
  std::string out;

  // synth
  std::string grammar = "mobile-ui";
  int n = 1000;

  // train
  std::string dataset;
  std::string config;
  std::string log_dir;
  int relnet_steps = -1, boxgen_steps = -1, refine_steps = -1, classifier_steps = -1, batch = -1;
  bool no_classifier = false;
  std::string order;

  // generate / complete / refine / recommend
  std::string constraints;
  std::string layout;
  int samples = 1;
  bool no_refine = false;
  bool prior_mean = false;
  std::vector<std::string> fixed_sizes;
  std::string mode = "argmax";
  std::vector<std::string> targets;
  bool sample = false;
  bool refine = false;

  // eval
  std::string report;
  int trials = 1;
  int max_designs = 0;
  bool ablation = false;
  std::string split = "test";

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
};

int cmd_synth(const Options& o, std::ostream& out) {
  const auto grammar = data::parse_grammar(o.grammar);
  if (!grammar) throw ValidationError("--grammar must be mobile-ui or banner-ad");
  if (o.n < 1) throw ValidationError("--n must be at least 1");
  const auto layouts = data::synth_generate(o.n, o.seed, *grammar);
  data::DatasetManifest m;
  m.root = o.out;
  m.seed = o.seed;
  m.grammar = o.grammar;
  m.count = o.n;
  data::write_corpus(o.out, layouts, m);
  out << "wrote " << layouts.size() << " layouts to " << o.out << "\n";
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  TrainingConfig cfg;
  if (!o.config.empty()) cfg = config_from_json(read_json_file(o.config));
  cfg.seed = o.seed;
  if (o.relnet_steps >= 0) cfg.relnet.steps = o.relnet_steps;
  if (o.boxgen_steps >= 0) cfg.boxgen.steps = o.boxgen_steps;
  if (o.refine_steps >= 0) cfg.refine.steps = o.refine_steps;
  if (o.classifier_steps >= 0) cfg.classifier.steps = o.classifier_steps;
  if (o.batch > 0) {
    for (StageConfig* s : {&cfg.relnet, &cfg.boxgen, &cfg.refine, &cfg.classifier}) s->batch = o.batch;
  }
  if (o.no_classifier) cfg.train_classifier = false;
  if (!o.order.empty()) {
    const auto order = boxgen::parse_order(o.order);
    if (!order) throw ValidationError("--order must be random, size or occurrence");
    cfg.order = *order;
  }
  cfg.validate();

  const auto ds = data::load_split(o.dataset, data::Split::Train);
  for (const auto& s : ds.data.skipped) err << "skipped " << s.file << ": " << s.reason << "\n";
  auto result = train_all(cfg, ds.manifest.categories, ds.data.layouts,
                          [&err](const std::string& module, int step, double loss) {
                            err << module << " step " << step << " loss " << loss << "\n";
                          });
  const std::string hash = save_checkpoint(result.bundle, o.out);
  write_loss_curves(result.curves, o.log_dir.empty() ? fs::path(o.out) / "logs" : fs::path(o.log_dir));
  out << "checkpoint " << o.out << " " << hash << "\n";
  return kExitOk;
}

int cmd_generate(const Options& o, std::ostream& out) {
  const ModelBundle bundle = load_checkpoint(resolve_checkpoint(o.checkpoint));
  const LayoutGraph graph = read_constraints(o.constraints, bundle);
  GenerateOptions g;
  g.samples = o.samples;
  g.seed = o.seed;
  g.refine = !o.no_refine;
  g.prior_mean = o.prior_mean;
  for (const auto& spec : o.fixed_sizes) {
    const auto [index, wh] = parse_fixed_size(spec);
    g.fixed_sizes[index] = wh;
  }
  const auto res = generate_layouts(bundle, graph, g);
  fs::create_directories(o.out);
  char name[32];
  for (size_t k = 0; k < res.layouts.size(); ++k) {
    std::snprintf(name, sizeof name, "sample_%03zu.json", k);
    write_text_file((fs::path(o.out) / name).string(), serialize_layout(res.layouts[k], bundle.categories) + "\n");
    std::snprintf(name, sizeof name, "graph_%03zu.json", k);
    write_text_file((fs::path(o.out) / name).string(), serialize_constraints(res.graphs[k], bundle.categories) + "\n");
  }
  out << "wrote " << res.layouts.size() << " layouts to " << o.out << "\n";
  return kExitOk;
}

int cmd_complete(const Options& o, std::ostream& out) {
  const ModelBundle bundle = load_checkpoint(resolve_checkpoint(o.checkpoint));
  const LayoutGraph graph = read_constraints(o.constraints, bundle);
  if (o.mode != "argmax" && o.mode != "sample") throw ValidationError("--mode must be argmax or sample");
  const auto mode = o.mode == "argmax" ? relnet::CompletionMode::Argmax : relnet::CompletionMode::Sample;
  const LayoutGraph done = complete_constraints(bundle, graph, mode, o.seed);
  write_text_file(o.out, serialize_constraints(done, bundle.categories) + "\n");
  out << "wrote " << o.out << "\n";
  return kExitOk;
}

int cmd_refine(const Options& o, std::ostream& out) {
  const ModelBundle bundle = load_checkpoint(resolve_checkpoint(o.checkpoint));
  const Layout layout = read_layout(o.layout, bundle.categories);
  LayoutGraph graph = o.constraints.empty() ? graph_from_layout(layout) : read_constraints(o.constraints, bundle);
  if (graph.nodes() != LayoutGraph(layout.categories()).nodes()) {
    throw ValidationError("--constraints: components do not match the layout");
  }
  if (!graph.is_complete()) graph = complete_constraints(bundle, graph, relnet::CompletionMode::Argmax, o.seed);
  write_text_file(o.out, serialize_layout(bundle.refiner->refine(graph, layout), bundle.categories) + "\n");
  out << "wrote " << o.out << "\n";
  return kExitOk;
}

int cmd_recommend(const Options& o, std::ostream& out) {
  const ModelBundle bundle = load_checkpoint(resolve_checkpoint(o.checkpoint));
  const Layout placed = read_layout(o.layout, bundle.categories);
  std::vector<CategoryId> targets;
  for (const auto& t : o.targets) {
    if (!bundle.categories.contains(t)) throw ValidationError("--target: unknown category \"" + t + "\"");
    targets.push_back(bundle.categories.id(t));
  }
  RecommendOptions r;
  r.seed = o.seed;
  r.prior_mean = !o.sample;
  r.refine = o.refine;
  const Recommendation rec = recommend(bundle, placed, targets, r);
  write_text_file(o.out, serialize_layout(rec.layout, bundle.categories) + "\n");
  out << "wrote " << o.out << "\n";
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const ModelBundle bundle = load_checkpoint(resolve_checkpoint(o.checkpoint));
  const auto split = data::parse_split(o.split);
  if (!split) throw ValidationError("--split must be train, val, test or all");
  const auto ds = data::load_split(o.dataset, *split);
  if (!(ds.manifest.categories == bundle.categories)) {
    throw ValidationError("--dataset: category table differs from the checkpoint's");
  }
  if (ds.data.layouts.empty()) throw ValidationError("--dataset: the " + o.split + " split is empty");
  EvalOptions e;
  e.trials = o.trials;
  e.samples_per_design = o.samples;
  e.max_designs = o.max_designs;
  e.refine = !o.no_refine;
  e.seed = o.seed;
  const TrialSummary summary = evaluate_checkpoint(bundle, ds.data.layouts, e);
  json report = to_json(summary);
  report["checkpoint"] = bundle.hash;
  if (o.ablation) {
    std::span<const Layout> test = ds.data.layouts;
    if (o.max_designs > 0 && static_cast<size_t>(o.max_designs) < test.size()) {
      test = test.first(static_cast<size_t>(o.max_designs));
    }
    json rows = json::array();
    for (const auto& mix : ablation_rows()) {
      err << "ablation row " << rows.size() + 1 << "/" << ablation_rows().size() << "\n";
      rows.push_back(to_json(run_ablation_row(bundle, test, mix, o.samples, o.seed)));
    }
    report["ablation"] = rows;
  }
  write_text_file(o.report, report.dump(2) + "\n");
  out << "wrote " << o.report << "\n";
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  auto bundle = std::make_shared<const ModelBundle>(load_checkpoint(resolve_checkpoint(o.checkpoint)));
  Service service(bundle);
  out << "serving checkpoint " << bundle->hash << " on http://" << o.host << ":" << o.port << "\n" << std::flush;
  if (!service.listen(o.host, o.port)) throw std::runtime_error("cannot listen on " + o.host + ":" + std::to_string(o.port));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ndn: constraint-driven layout generation toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Write a synthetic layout corpus");
  synth->add_option("--grammar", o.grammar, "mobile-ui or banner-ad")->capture_default_str();
  synth->add_option("--n", o.n, "Number of layouts")->capture_default_str();
  synth->add_option("--out", o.out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train all networks and write a checkpoint");
  train->add_option("--dataset", o.dataset, "Dataset directory (train split is used)")->required();
  train->add_option("--out", o.out, "Checkpoint directory")->required();
  train->add_option("--config", o.config, "Training config JSON (missing keys keep defaults)");
  train->add_option("--log-dir", o.log_dir, "Loss-curve CSV directory (default <out>/logs)");
  train->add_option("--relnet-steps", o.relnet_steps, "Override relnet steps (default 1500)");
  train->add_option("--boxgen-steps", o.boxgen_steps, "Override boxgen steps (default 2000)");
  train->add_option("--refine-steps", o.refine_steps, "Override refine steps (default 3000)");
  train->add_option("--classifier-steps", o.classifier_steps, "Override classifier steps (default 1500)");
  train->add_option("--batch", o.batch, "Override every stage's batch size (default 64)");
  train->add_option("--order", o.order, "Component order for boxgen: random, size or occurrence (default random)");
  train->add_flag("--no-classifier", o.no_classifier, "Skip the FID classifier");

  auto* generate = app.add_subcommand("generate", "Generate layouts from constraints");
  generate->add_option("--constraints", o.constraints, "Constraint JSON")->required();
  generate->add_option("--samples", o.samples, "Layouts to generate")->capture_default_str();
  generate->add_option("--out", o.out, "Output directory")->required();
  generate->add_option("--fixed-size", o.fixed_sizes, "Fix a component's size: INDEX:W:H (repeatable)");
  generate->add_flag("--no-refine", o.no_refine, "Skip the refinement pass");
  generate->add_flag("--prior-mean", o.prior_mean, "Decode the prior mean instead of sampling");

  auto* complete = app.add_subcommand("complete", "Complete a partial constraint graph");
  complete->add_option("--constraints", o.constraints, "Constraint JSON")->required();
  complete->add_option("--out", o.out, "Output constraint JSON")->required();
  complete->add_option("--mode", o.mode, "argmax or sample")->capture_default_str();

  auto* refine = app.add_subcommand("refine", "Refine a layout");
  refine->add_option("--layout", o.layout, "Layout JSON")->required();
  refine->add_option("--constraints", o.constraints, "Constraint graph (default: relations read off the layout)");
  refine->add_option("--out", o.out, "Output layout JSON")->required();

  auto* rec = app.add_subcommand("recommend", "Recommend boxes for new components on a partial layout");
  rec->add_option("--layout", o.layout, "Layout JSON with the placed components")->required();
  rec->add_option("--target", o.targets, "Category to place (repeatable)")->required();
  rec->add_option("--out", o.out, "Output layout JSON")->required();
  rec->add_flag("--sample", o.sample, "Sample instead of decoding the prior mean");
  rec->add_flag("--refine", o.refine, "Refine the recommended boxes");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  ev->add_option("--dataset", o.dataset, "Dataset directory")->required();
  ev->add_option("--report", o.report, "Output report JSON")->required();
  ev->add_option("--split", o.split, "train, val, test or all")->capture_default_str();
  ev->add_option("--trials", o.trials, "Generation trials to average")->capture_default_str();
  ev->add_option("--samples", o.samples, "Samples per design")->capture_default_str();
  ev->add_option("--max-designs", o.max_designs, "Cap on designs (0 = all)")->capture_default_str();
  ev->add_flag("--no-refine", o.no_refine, "Skip refinement of generated layouts");
  ev->add_flag("--ablation", o.ablation, "Add the partial-constraint ablation rows");

  auto* serve = app.add_subcommand("serve", "Serve the JSON API");
  serve->add_option("--host", o.host, "Bind address")->capture_default_str();
  serve->add_option("--port", o.port, "Port")->capture_default_str();

  for (auto* sub : {synth, train, generate, complete, refine, rec, ev, serve}) {
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  }
  for (auto* sub : {generate, complete, refine, rec, ev, serve}) {
    sub->add_option("--checkpoint", o.checkpoint, std::string("Checkpoint directory (default $") + kCheckpointEnv + ")");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInvalid;
  }

  try {
    if (*synth) return cmd_synth(o, out);
    if (*train) return cmd_train(o, out, err);
    if (*generate) return cmd_generate(o, out);
    if (*complete) return cmd_complete(o, out);
    if (*refine) return cmd_refine(o, out);
    if (*rec) return cmd_recommend(o, out);
    if (*ev) return cmd_eval(o, out, err);
    if (*serve) return cmd_serve(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitInvalid;
}

}  // namespace ndn::harness
