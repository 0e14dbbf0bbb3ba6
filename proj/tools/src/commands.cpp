#include "commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "freqseg/dtcwt.hpp"
#include "freqseg/filter_tables.hpp"
#include "freqseg/fuse.hpp"
#include "freqseg/hyper.hpp"
#include "freqseg/image2d.hpp"
#include "freqseg/lesion_metrics.hpp"
#include "freqseg/nifti.hpp"
#include "freqseg/nsct.hpp"
#include "freqseg/prep.hpp"
#include "freqseg/version.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;

namespace freqseg::cli {
namespace {

/// Failure inside a transform or computation, as opposed to bad input.
class ComputeFailure : public Error {
 public:
  using Error::Error;
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ComputeFailure*>(&e)) return kExitCompute;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e)) return kExitIo;
  if (dynamic_cast<const ArgumentError*>(&e) || dynamic_cast<const SchemaViolation*>(&e) ||
      dynamic_cast<const CompatibilityError*>(&e) || dynamic_cast<const SpecError*>(&e)) {
    return kExitUsage;
  }
  return kExitCompute;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

fs::path manifest_beside(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::vector<std::string> cases;
  std::string out;
  int levels = kDefaultDtcwtLevels;
  std::string filters;
  std::string pattern = "{id}-{mod}.nii.gz";
  unsigned jobs = 1;
};

std::string expand_pattern(const std::string& pattern, const std::string& id, std::string_view mod) {
  std::string s = pattern;
  for (std::size_t p; (p = s.find("{id}")) != std::string::npos;) s.replace(p, 4, id);
  for (std::size_t p; (p = s.find("{mod}")) != std::string::npos;) s.replace(p, 5, std::string(mod));
  return s;
}

// Finds the id of the single file in `dir` matching `pattern` for t1n.
std::optional<std::string> infer_case_id(const fs::path& dir, const std::string& pattern) {
  std::string rx;
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern.compare(i, 4, "{id}") == 0) {
      rx += "(.+)";
      i += 4;
    } else if (pattern.compare(i, 5, "{mod}") == 0) {
      rx += "t1n";
      i += 5;
    } else {
      if (std::string_view("\\^$.|?*+()[]{}").find(pattern[i]) != std::string_view::npos) rx += '\\';
      rx += pattern[i++];
    }
  }
  const std::regex re(rx);
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, re)) ids.push_back(m[1].str());
  }
  if (ids.size() == 1) return ids.front();
  return std::nullopt;
}

struct CaseFiles {
  std::string id;
  std::map<Modality, fs::path> files;
};

CaseFiles resolve_case(const fs::path& dir_in, const std::string& pattern) {
  const fs::path dir = dir_in.lexically_normal();
  if (!fs::is_directory(dir)) throw IoError(dir_in.string() + ": not a directory");
  fs::path name = dir.filename();
  if (name.empty()) name = dir.parent_path().filename();

  CaseFiles c{name.string(), {}};
  if (!fs::exists(dir / expand_pattern(pattern, c.id, "t1n"))) {
    if (auto inferred = infer_case_id(dir, pattern)) c.id = *inferred;
  }
  for (const Modality m : kModalities) {
    const fs::path p = dir / expand_pattern(pattern, c.id, modality_name(m));
    if (!fs::exists(p)) {
      throw ArgumentError("case " + c.id + ": missing modality " + std::string(modality_name(m)) + " (expected " +
                          p.string() + ")");
    }
    c.files.emplace(m, p);
  }
  return c;
}

int cmd_decompose(const DecomposeArgs& a, std::ostream& out) {
  if (a.pattern.find("{mod}") == std::string::npos) throw ArgumentError("--pattern must contain {mod}");
  RunManifest manifest("decompose");
  auto& cfg = manifest.config();
  cfg["cases"] = a.cases;
  cfg["out"] = a.out;
  cfg["levels"] = a.levels;
  cfg["pattern"] = a.pattern;
  cfg["jobs"] = a.jobs;

  std::optional<fs::path> filter_path;
  if (!a.filters.empty()) filter_path = a.filters;
  const FilterTables tables = FilterTables::resolve(filter_path);
  const DtcwtFilters dtcwt = DtcwtFilters::from_tables(tables);
  const NsctKernels nsct = NsctKernels::from_tables(tables);
  if (filter_path) {
    cfg["filters"] = filter_path->string();
  } else if (const char* env = std::getenv(kFilterTablesEnvVar); env && *env) {
    cfg["filters"] = env;
  } else {
    cfg["filters"] = "embedded";
  }

  std::vector<CaseFiles> cases;
  for (const auto& dir : a.cases) cases.push_back(resolve_case(dir, a.pattern));
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (std::size_t j = i + 1; j < cases.size(); ++j) {
      if (cases[i].id == cases[j].id) throw ArgumentError("duplicate case id " + cases[i].id);
    }
  }

  const fs::path out_dir(a.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError(a.out + ": cannot create output directory");

  const unsigned outer = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(cases.size())));
  DecomposeOptions opts;
  opts.levels = a.levels;
  opts.dtcwt = &dtcwt;
  opts.nsct = &nsct;
  opts.jobs = std::max(1u, a.jobs / outer);

  std::vector<std::vector<fs::path>> written(cases.size());
  parallel_for(cases.size(), outer, [&](std::size_t i) {
    const CaseFiles& c = cases[i];
    CaseBundle bundle{c.id, {}};
    for (const auto& [m, p] : c.files) bundle.modalities.emplace(m, nifti::read_scalar(p));
    bundle.validate();
    try {
      decompose_case(bundle, opts, [&](const std::string& channel, ScalarVolume&& v) {
        const fs::path p = out_dir / (c.id + "-" + channel + ".nii.gz");
        nifti::write_scalar(p, v);
        written[i].push_back(p);
      });
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw ComputeFailure("case " + c.id + ": decomposition failed: " + e.what());
    }
  });

  for (const auto& c : cases) {
    for (const auto& [m, p] : c.files) manifest.add_input(p);
  }
  std::size_t n = 0;
  for (const auto& list : written) {
    for (const auto& p : list) manifest.add_output(p);
    n += list.size();
  }
  manifest.write(out_dir / "manifest.json");
  out << "wrote " << n << " channels for " << cases.size() << " case(s) to " << out_dir.string() << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- fuse

struct FuseArgs {
  std::vector<std::string> probs;
  std::string weights;
  std::string out;
  std::string save_prob;
  std::string schema = "ped2025";
};

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const char* first = item.data();
    while (first != item.data() + item.size() && *first == ' ') ++first;
    const auto res = std::from_chars(first, item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw ArgumentError("cannot parse weight \"" + item + "\"");
    }
    w.push_back(v);
  }
  return w;
}

int cmd_fuse(const FuseArgs& a, std::ostream& out) {
  RunManifest manifest("fuse");
  if (a.probs.size() < 2) throw ArgumentError("fuse needs at least two --probs files");
  const EnsembleSpec spec = a.weights.empty() ? EnsembleSpec::equal(a.probs.size()) : EnsembleSpec{parse_weights(a.weights)};
  if (spec.weights.size() != a.probs.size()) {
    throw ArgumentError(std::to_string(spec.weights.size()) + " weights given for " + std::to_string(a.probs.size()) +
                        " probability files");
  }
  spec.validate();
  manifest.config()["probs"] = a.probs;
  manifest.config()["weights"] = spec.weights;
  manifest.config()["schema"] = a.schema;
  manifest.config()["out"] = a.out;
  if (!a.save_prob.empty()) manifest.config()["save_prob"] = a.save_prob;

  std::vector<ProbVolume> models;
  for (const auto& p : a.probs) {
    models.push_back(nifti::read_prob(p));
    manifest.add_input(p);
  }
  const ProbVolume fused = fuse_probs(models, spec);
  const LabelVolume labels = argmax_labels(fused, LabelSchema::ped2025());
  nifti::write_labels(a.out, labels);
  manifest.add_output(a.out);
  if (!a.save_prob.empty()) {
    nifti::write_prob(a.save_prob, fused);
    manifest.add_output(a.save_prob);
  }
  manifest.write(manifest_beside(a.out));
  out << "fused " << models.size() << " models into " << a.out << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string ref;
  std::string schema = "ped2025";
  MetricConfig metrics;
  std::string report;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  a.metrics.validate();
  RunManifest manifest("eval");
  const LabelSchema schema = LabelSchema::ped2025();
  const LabelVolume ref = nifti::read_labels(a.ref, schema);
  const LabelVolume pred = nifti::read_labels(a.pred, schema);
  manifest.add_input(a.ref);
  manifest.add_input(a.pred);

  const LesionReport report = lesion_wise_scores(ref, pred, schema, a.metrics);
  nlohmann::ordered_json j = to_json(report);
  {
    std::ofstream f(a.report, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(a.report + ": cannot open for writing");
    f << j.dump(2) << '\n';
    if (!f) throw IoError(a.report + ": write failed");
  }
  manifest.config() = to_json(a.metrics);
  manifest.config()["schema"] = a.schema;
  manifest.config()["report"] = a.report;
  manifest.add_output(a.report);
  manifest.write(manifest_beside(a.report));

  for (const auto& name : report.region_order) {
    const RegionScore& s = report.regions.at(name);
    out << name << " lesion_dice=" << s.lesion_dice << " lesion_nsd=" << s.lesion_nsd << '\n';
  }
  return kExitOk;
}

// -------------------------------------------------------------- znorm/patch

struct ZnormArgs {
  std::string in;
  std::string out;
  std::string mode = "nonzero";
};

int cmd_znorm(const ZnormArgs& a, std::ostream& out) {
  RunManifest manifest("znorm");
  manifest.config() = {{"in", a.in}, {"out", a.out}, {"mode", a.mode}};
  const ScalarVolume vol = nifti::read_scalar(a.in);
  manifest.add_input(a.in);
  ScalarVolume z = [&] {
    try {
      return zscore(vol, a.mode == "all" ? ZscoreMode::AllVoxels : ZscoreMode::NonzeroMask);
    } catch (const std::exception& e) {
      throw ComputeFailure(std::string("z-score failed: ") + e.what());
    }
  }();
  nifti::write_scalar(a.out, z);
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

struct PatchArgs {
  std::string in;
  std::string out;
  std::vector<std::size_t> size;
  std::string mode = "centered";
  std::optional<std::uint64_t> seed;
  double pad_value = 0.0;
};

int cmd_patch(const PatchArgs& a, std::ostream& out) {
  if (a.size.size() != 3) throw ArgumentError("--size needs three comma-separated extents");
  PatchSpec spec;
  spec.size = {a.size[0], a.size[1], a.size[2]};
  spec.mode = a.mode == "random" ? PatchMode::SeededRandom : PatchMode::Centered;
  spec.seed = a.seed;
  spec.pad_value = a.pad_value;
  spec.validate();

  RunManifest manifest("patch");
  manifest.config() = {{"in", a.in}, {"out", a.out}, {"size", a.size}, {"mode", a.mode}, {"pad_value", a.pad_value}};
  if (a.seed) manifest.config()["seed"] = *a.seed;
  const ScalarVolume vol = nifti::read_scalar(a.in);
  manifest.add_input(a.in);
  nifti::write_scalar(a.out, extract_patch(vol, spec));
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ lr / init

struct LrArgs {
  ScheduleSpec schedule;
  std::string out;
};

int cmd_lr_curve(const LrArgs& a, std::ostream& out) {
  a.schedule.validate();
  const std::vector<double> lr = lr_curve(a.schedule);
  std::ostringstream csv;
  csv << "epoch,lr\n";
  for (std::size_t e = 0; e < lr.size(); ++e) csv << e << ',' << format_double(lr[e]) << '\n';
  if (a.out.empty()) {
    out << csv.str();
    return kExitOk;
  }
  {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(a.out + ": cannot open for writing");
    f << csv.str();
  }
  RunManifest manifest("lr-curve");
  manifest.config() = {{"lr_init", a.schedule.lr_init}, {"max_epoch", a.schedule.max_epoch},
                       {"exponent", ScheduleSpec::kExponent}, {"out", a.out}};
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  return kExitOk;
}

struct InitArgs {
  InitSpec spec;
  std::size_t n = 1000000;
  std::uint64_t seed = 0;
  std::string stats;
};

int cmd_init_sample(const InitArgs& a, std::ostream& out) {
  a.spec.validate();
  if (a.n < 2) throw ArgumentError("--n must be at least 2");
  const SampleStats s = summarize_samples(a.spec, sample_init(a.spec, a.n, a.seed));
  const nlohmann::ordered_json j{{"n", s.n}, {"mean", s.mean}, {"std", s.std}, {"target_std", s.target_std}};
  if (a.stats.empty()) {
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  {
    std::ofstream f(a.stats, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(a.stats + ": cannot open for writing");
    f << j.dump(2) << '\n';
  }
  RunManifest manifest("init-sample");
  manifest.config() = {{"d", a.spec.fan_in}, {"gamma", a.spec.gamma}, {"n", a.n}, {"seed", a.seed}, {"stats", a.stats}};
  manifest.add_output(a.stats);
  manifest.write(manifest_beside(a.stats));
  return kExitOk;
}

constexpr const char* kConfigHelp =
    "Read defaults from a flat key=value file (one per line, '#' comments). Keys are long option "
    "names, qualified by subcommand, e.g. 'decompose.levels=4' or 'eval.tau=1.0'. Command-line "
    "flags override the file.";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency decomposition, ensemble fusion and lesion-wise evaluation for brain tumour MRI"};
  app.name("freqseg");
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", kConfigHelp);
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* sdec = app.add_subcommand("decompose", "Write the LF and four directional HF channels for every modality");
  sdec->add_option("--case", dec.cases, "Case directory (repeatable)")->required();
  sdec->add_option("--out", dec.out, "Output directory")->required();
  sdec->add_option("--levels", dec.levels, "DTCWT levels for the LF channel")->capture_default_str()->check(CLI::Range(1, 8));
  sdec->add_option("--filters", dec.filters, std::string("Filter table file (else $") + kFilterTablesEnvVar + ", else built-in)");
  sdec->add_option("--pattern", dec.pattern, "Input file name pattern with {id} and {mod}")->capture_default_str();
  sdec->add_option("--jobs", dec.jobs, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 256u));

  FuseArgs fus;
  auto* sfus = app.add_subcommand("fuse", "Weighted average of 4D probability maps, then argmax labels");
  sfus->add_option("--probs", fus.probs, "Probability maps (4D, class last)")->required()->expected(2, 64);
  sfus->add_option("--weights", fus.weights, "Comma-separated weights summing to 1 (default: equal)");
  sfus->add_option("--out", fus.out, "Output label map")->required();
  sfus->add_option("--save-prob", fus.save_prob, "Also write the fused probabilities");
  sfus->add_option("--schema", fus.schema, "Label schema")->capture_default_str()->check(CLI::IsMember({"ped2025"}));

  EvalArgs ev;
  auto* sev = app.add_subcommand("eval", "Lesion-wise Dice and NSD per evaluation region");
  sev->add_option("--pred", ev.pred, "Predicted label map")->required();
  sev->add_option("--ref", ev.ref, "Reference label map")->required();
  sev->add_option("--schema", ev.schema, "Label schema")->capture_default_str()->check(CLI::IsMember({"ped2025"}));
  sev->add_option("--tau", ev.metrics.tau_mm, "NSD tolerance in mm")->capture_default_str();
  sev->add_option("--dilation", ev.metrics.match_dilation_voxels, "Matching dilation in voxels")->capture_default_str();
  sev->add_option("--connectivity", ev.metrics.connectivity, "Component connectivity")
      ->capture_default_str()
      ->check(CLI::IsMember({6, 18, 26}));
  sev->add_option("--min-lesion", ev.metrics.min_lesion_voxels, "Ignore reference lesions smaller than this")
      ->capture_default_str();
  sev->add_flag("--whole-region", ev.metrics.whole_region, "Also report whole-region Dice and NSD");
  sev->add_option("--report", ev.report, "JSON report path")->required();

  ZnormArgs zn;
  auto* szn = app.add_subcommand("znorm", "Z-score normalize a volume");
  szn->add_option("--in", zn.in, "Input volume")->required();
  szn->add_option("--out", zn.out, "Output volume")->required();
  szn->add_option("--mode", zn.mode, "Voxels used for the statistics")
      ->capture_default_str()
      ->check(CLI::IsMember({"nonzero", "all"}));

  PatchArgs pa;
  auto* spa = app.add_subcommand("patch", "Crop or pad a volume to a fixed patch size");
  spa->add_option("--in", pa.in, "Input volume")->required();
  spa->add_option("--out", pa.out, "Output volume")->required();
  spa->add_option("--size", pa.size, "Patch extent x,y,z")->required()->delimiter(',')->expected(3);
  spa->add_option("--mode", pa.mode, "Patch placement")->capture_default_str()->check(CLI::IsMember({"centered", "random"}));
  spa->add_option("--seed", pa.seed, "Seed for random placement");
  spa->add_option("--pad-value", pa.pad_value, "Fill value where the input is smaller")->capture_default_str();

  LrArgs lr;
  auto* slr = app.add_subcommand("lr-curve", "Polynomial-decay learning rate per epoch as CSV");
  slr->add_option("--init", lr.schedule.lr_init, "Initial learning rate")->capture_default_str();
  slr->add_option("--epochs", lr.schedule.max_epoch, "Final epoch")->capture_default_str();
  slr->add_option("--out", lr.out, "CSV path (default: stdout)");

  InitArgs in;
  auto* sin = app.add_subcommand("init-sample", "Draw weight-init samples and report their statistics");
  sin->add_option("--d", in.spec.fan_in, "Fan-in")->required();
  sin->add_option("--gamma", in.spec.gamma, "Exponent of the std law d^-gamma")->required();
  sin->add_option("--n", in.n, "Number of draws")->capture_default_str();
  sin->add_option("--seed", in.seed, "RNG seed")->capture_default_str();
  sin->add_option("--stats", in.stats, "JSON stats path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sdec) return cmd_decompose(dec, out);
    if (*sfus) return cmd_fuse(fus, out);
    if (*sev) return cmd_eval(ev, out);
    if (*szn) return cmd_znorm(zn, out);
    if (*spa) return cmd_patch(pa, out);
    if (*slr) return cmd_lr_curve(lr, out);
    if (*sin) return cmd_init_sample(in, out);
  } catch (const std::exception& e) {
    err << "freqseg: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace freqseg::cli
