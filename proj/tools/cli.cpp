// Copyright 2026 The fpq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fpq/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fpq/analytic.hpp"
#include "fpq/formats.hpp"
#include "fpq/io.hpp"
#include "fpq/learn.hpp"
#include "fpq/notation.hpp"
#include "fpq/quantsim.hpp"
#include "fpq/search.hpp"

namespace fpq::cli {

namespace {

using nlohmann::json;
using AnyFormat = std::variant<FpFormat, IntFormat>;

const std::vector<std::string> kFp8Auto = {"1M6E:auto", "2M5E:auto", "3M4E:auto",
                                           "4M3E:auto", "5M2E:auto", "6M1E:auto"};

/// Raised when a verify run finds mismatches; carries the already-written report.
struct VerifyFailed {};

/// JSON config files: top-level keys are root options, nested objects are
/// subcommands ({"learn": {"seed": 3}}).
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError("config", e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config", "top level must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::string range_text(const Distribution& d) {
  return format_real(d.clip_min()) + ":" + format_real(d.clip_max());
}

// --- grid ------------------------------------------------------------------

struct GridArgs {
  std::string format;
  std::string dist;
  std::string output;
};

void cmd_grid(const GridArgs& a, std::ostream& out) {
  const FormatSpec spec = parse_format(a.format);
  const AnyFormat format = a.dist.empty() ? resolve_format(spec) : resolve_format(spec, parse_distribution(a.dist));
  const QuantGrid values = format_grid(format);
  std::string text;
  for (double v : values.values()) text += format_real(v) + "\n";
  emit(text, a.output, out);
}

// --- mse-sweep -------------------------------------------------------------

struct SweepArgs {
  std::vector<std::string> formats = {"INT8:auto", "1M6E:auto", "2M5E:auto", "3M4E:auto",
                                      "4M3E:auto", "5M2E:auto", "6M1E:auto"};
  std::vector<std::string> dists;
  std::string output;
};

void cmd_mse_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<FormatSpec> specs;
  for (const auto& f : a.formats) specs.push_back(parse_format(f));
  std::vector<Distribution> dists;
  for (const auto& d : a.dists) dists.push_back(parse_distribution(d));

  std::string text = "format,bias,distribution,param,range,E_round,E_clip,mse,sqnr_db\n";
  for (const auto& d : dists) {
    const double power = second_moment(d);
    for (const auto& spec : specs) {
      const AnyFormat format = resolve_format(spec, d);
      const ErrorBreakdown e = expected_mse(format_grid(format), d);
      text += spec.layout() + "," + format_real(format_parameter(format)) + "," + d.family_name() + "," +
              d.param_string() + "," + range_text(d) + "," + format_real(e.rounding) + "," +
              format_real(e.clipping) + "," + format_real(e.total()) + "," +
              format_real(sqnr_db(power, e.total())) + "\n";
    }
  }
  emit(text, a.output, out);
}

// --- dotprod-mse -----------------------------------------------------------

struct DotArgs {
  std::string w_dist;
  std::string x_dist;
  std::vector<std::string> w_formats = kFp8Auto;
  std::vector<std::string> x_formats = kFp8Auto;
  std::string output;
};

void cmd_dotprod(const DotArgs& a, std::ostream& out) {
  const Distribution w = parse_distribution(a.w_dist);
  const Distribution x = parse_distribution(a.x_dist);
  auto resolve_all = [](const std::vector<std::string>& texts, const Distribution& d) {
    std::vector<std::pair<FormatSpec, AnyFormat>> r;
    for (const auto& t : texts) {
      const FormatSpec spec = parse_format(t);
      r.emplace_back(spec, resolve_format(spec, d));
    }
    return r;
  };
  const auto wf = resolve_all(a.w_formats, w);
  const auto xf = resolve_all(a.x_formats, x);
  const double power = second_moment(w) * second_moment(x);

  std::string text = "w_format,w_bias,x_format,x_bias,mse_full,mse_approx,rel_gap,sqnr_db\n";
  for (const auto& [ws, wfmt] : wf) {
    const QuantGrid gw = format_grid(wfmt);
    for (const auto& [xs, xfmt] : xf) {
      const QuantGrid gx = format_grid(xfmt);
      const double full = scalar_product_mse(gw, w, gx, x);
      const double approx = scalar_product_mse_approx(gw, w, gx, x);
      const double gap = full == 0.0 ? 0.0 : (full - approx) / full;
      text += ws.layout() + "," + format_real(format_parameter(wfmt)) + "," + xs.layout() + "," +
              format_real(format_parameter(xfmt)) + "," + format_real(full) + "," + format_real(approx) + "," +
              format_real(gap) + "," + format_real(sqnr_db(power, full)) + "\n";
    }
  }
  emit(text, a.output, out);
}

// --- quantize / search -----------------------------------------------------

json search_json(const FormatSearchResult& r) {
  json j;
  j["m"] = r.mantissa_bits;
  j["e"] = r.exponent_bits;
  if (r.per_channel) {
    j["c_per_channel"] = r.clip;
    j["mse_per_channel"] = r.mse;
  } else {
    j["c"] = r.clip.front();
  }
  j["mse"] = r.total_mse;
  j["degenerate_channels"] = r.degenerate_channels;
  return j;
}

struct SearchArgs {
  std::string input;
  bool per_channel = false;
  std::string output;
};

void cmd_search(const SearchArgs& a, std::ostream& out) {
  const Tensor x = read_tensor(a.input);
  emit(search_json(grid_search_format(x, a.per_channel)).dump(2) + "\n", a.output, out);
}

struct QuantizeArgs {
  std::string input;
  std::string output;
  std::string format;
  bool search = false;
  bool per_channel = false;
  std::string report;
};

double signal_power(const Tensor& x) { return x.data().square().mean(); }

void cmd_quantize(const QuantizeArgs& a, std::ostream& out) {
  const Tensor x = read_tensor(a.input);
  json report;
  QuantizerConfig config;
  if (a.search) {
    const FormatSearchResult r = grid_search_format(x, a.per_channel);
    config = r.config();
    report = search_json(r);
    report["format"] = layout_name(r.mantissa_bits, r.exponent_bits);
  } else {
    const FormatSpec spec = parse_format(a.format);
    report["format"] = spec.layout();
    if (a.per_channel) {
      if (spec.mode != ParamMode::kMinMax) throw ParseError("per-channel quantization needs a ':minmax' format");
      if (!x.channel_axis()) throw TensorError("per-channel quantization needs a channel axis");
      std::vector<double> params;
      std::optional<AnyFormat> first;
      for (const auto& ch : x.split_channels()) {
        const AnyFormat f = resolve_format(spec, ch.abs().maxCoeff());
        if (!first) first = f;
        params.push_back(format_parameter(f));
      }
      config = QuantizerConfig{*first, params};
      report[spec.is_int ? "scale_per_channel" : "bias_per_channel"] = params;
    } else {
      const AnyFormat f = resolve_format(spec, x.data().abs().maxCoeff());
      config = QuantizerConfig{f, {}};
      report[spec.is_int ? "scale" : "bias"] = format_parameter(f);
    }
  }
  if (const auto* fp = std::get_if<FpFormat>(&config.format)) {
    report["m"] = fp->mantissa_bits;
    report["e"] = fp->exponent_bits;
    if (a.search && !a.per_channel) report["bias"] = fp->bias;
    if (a.search && a.per_channel) report["bias_per_channel"] = config.channel_params;
  }
  const Tensor q = quantize(x, config);
  const double mse = empirical_mse(x, q);
  report["mse"] = mse;
  report["sqnr_db"] = mse == 0.0 ? json("inf") : json(sqnr_db(signal_power(x), mse));
  report["search"] = a.search;
  write_tensor(a.output, q);
  emit(report.dump(2) + "\n", a.report.empty() ? a.output + ".report.json" : a.report, out);
}

// --- learn -----------------------------------------------------------------

struct LearnArgs {
  std::uint64_t seed = 0;
  int samples = 100000;
  std::string init = "3M4E:b=8";
  double lr_c = kDefaultLearningRateClip;
  double lr_m = kDefaultLearningRateMantissa;
  int iterations = 500;
  bool line_search = false;
  std::string output;
};

void cmd_learn(const LearnArgs& a, std::ostream& out) {
  if (a.samples < 1) throw std::invalid_argument("--samples must be positive");
  const FormatSpec spec = parse_format(a.init);
  if (spec.is_int) throw ParseError("--init needs an FP format");
  const LearnState init = LearnState::from_format(std::get<FpFormat>(resolve_format(spec)));

  std::mt19937_64 rng(a.seed);
  std::normal_distribution<double> normal;
  Eigen::ArrayXd x(a.samples);
  for (auto& v : x) v = normal(rng);
  const Tensor samples = Tensor::vector(std::move(x));

  const Trajectory traj = sgd_learn(samples, init, a.lr_c, a.lr_m, a.iterations);
  std::string text = "iter,c,m,loss\n";
  for (const auto& p : traj.points) {
    text += std::to_string(p.iteration) + "," + format_real(p.clip) + "," + format_real(p.mantissa) + "," +
            format_real(p.loss) + "\n";
  }
  emit(text, a.output, out);

  json meta;
  meta["prng"] = "std::mt19937_64";
  meta["normal"] = "std::normal_distribution<double>";
  meta["seed"] = a.seed;
  meta["samples"] = a.samples;
  meta["init"] = a.init;
  meta["lr_c"] = a.lr_c;
  meta["lr_m"] = a.lr_m;
  meta["iterations"] = a.iterations;
  meta["diverged"] = traj.diverged;
  meta["final"] = {{"c", traj.final_state.clip},
                   {"m", traj.final_state.mantissa},
                   {"round_m", traj.final_state.rounded_mantissa()}};
  if (a.line_search) {
    const LineSearchResult ls = line_search_mse(samples);
    meta["line_search"] = {{"m", ls.mantissa_bits}, {"c", ls.clip}, {"mse", ls.mse}};
  }
  if (!a.output.empty() && a.output != "-") write_text_file(a.output + ".meta.json", meta.dump(2) + "\n");
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
  int trials = 1000000;
  std::uint64_t seed = 0;
  std::string fault = "none";
  int max_examples = 5;
};

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void cmd_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.trials < 2) throw std::invalid_argument("--trials must be at least 2");
  const Rounding rounding = a.fault == "ties-away" ? Rounding::kNearestAway : Rounding::kNearestEven;
  std::mt19937_64 rng(a.seed);
  long long total = 0;
  for (int m : {5, 4, 3, 2}) {
    for (double bias : {4.0, 8.0, 16.0}) {
      const FpFormat format = FpFormat::make(m, 7 - m, bias);
      const FpQuantizer fast(format, rounding);
      const QuantGrid grid = enumerate_grid(format);
      const double c = max_representable(format);

      std::vector<double> inputs;
      inputs.reserve(static_cast<std::size_t>(a.trials) + 3 * grid.values().size());
      std::uniform_real_distribution<double> wide(-2.0 * c, 2.0 * c);
      std::uniform_real_distribution<double> log_mag(std::log2(min_subnormal(format)) - 2.0, std::log2(2.0 * c));
      std::bernoulli_distribution sign;
      const int half = a.trials / 2;
      for (int i = 0; i < half; ++i) inputs.push_back(wide(rng));
      for (int i = half; i < a.trials; ++i) {
        const double mag = std::exp2(log_mag(rng));
        inputs.push_back(sign(rng) ? -mag : mag);
      }
      const auto values = grid.values();
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double mid = 0.5 * (values[i] + values[i + 1]);
        inputs.push_back(mid);
        inputs.push_back(std::nextafter(mid, -INFINITY));
        inputs.push_back(std::nextafter(mid, INFINITY));
      }

      long long mismatches = 0;
      std::string examples;
      for (double x : inputs) {
        const double f = fast(x);
        const double o = quantize_fp_oracle(x, grid);
        if (f != o || std::signbit(f) != std::signbit(o)) {
          if (mismatches < a.max_examples) {
            examples += "  x=" + hex(x) + " fast=" + hex(f) + " oracle=" + hex(o) + "\n";
          }
          ++mismatches;
        }
      }
      total += mismatches;
      out << layout_name(m, 7 - m) << " b=" << format_real(bias) << " inputs=" << inputs.size()
          << " mismatches=" << mismatches << "\n"
          << examples;
    }
  }
  out << "total mismatches: " << total << "\n";
  if (total != 0) throw VerifyFailed{};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-bit floating-point quantization toolkit", "fpq"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  GridArgs grid;
  auto* g = app.add_subcommand("grid", "Print the representable values of a format, one per line");
  g->add_option("format", grid.format, "Format, e.g. 2M2E:b=2 or INT8:s=1")->required();
  g->add_option("--dist", grid.dist, "Distribution used to resolve :auto / :minmax");
  g->add_option("-o,--output", grid.output, "Output file (default stdout)");

  SweepArgs sweep;
  auto* s = app.add_subcommand("mse-sweep", "Expected quantization MSE for formats x distributions (CSV)");
  s->add_option("--format", sweep.formats, "Formats to evaluate")->capture_default_str();
  s->add_option("--dist", sweep.dists, "Distributions, e.g. gaussian:0:1 or student:2@-100:100")->required();
  s->add_option("-o,--output", sweep.output, "Output file (default stdout)");

  DotArgs dot;
  auto* d = app.add_subcommand("dotprod-mse", "Expected scalar-product MSE over weight x activation formats (CSV)");
  d->add_option("--w-dist", dot.w_dist, "Weight distribution")->required();
  d->add_option("--x-dist", dot.x_dist, "Activation distribution")->required();
  d->add_option("--w-format", dot.w_formats, "Weight formats")->capture_default_str();
  d->add_option("--x-format", dot.x_formats, "Activation formats")->capture_default_str();
  d->add_option("-o,--output", dot.output, "Output file (default stdout)");

  QuantizeArgs quant;
  auto* q = app.add_subcommand("quantize", "Quantize a tensor file");
  q->add_option("-i,--input", quant.input, "Input tensor (.csv or raw float32 with .json sidecar)")->required();
  q->add_option("-o,--output", quant.output, "Output tensor")->required();
  auto* qf = q->add_option("--format", quant.format, "Fixed format, e.g. 4M3E:minmax or INT8:s=0.05");
  auto* qs = q->add_flag("--search", quant.search, "Pick m and c with the MSE grid search");
  qf->excludes(qs);
  q->add_flag("--per-channel", quant.per_channel, "One clipping value per channel");
  q->add_option("--report", quant.report, "JSON report path (default <output>.report.json)");

  SearchArgs search;
  auto* se = app.add_subcommand("search", "MSE-optimal 8-bit FP format for a tensor (JSON)");
  se->add_option("-i,--input", search.input, "Input tensor")->required();
  se->add_flag("--per-channel", search.per_channel, "Per-channel clipping values with a shared m");
  se->add_option("-o,--output", search.output, "Output file (default stdout)");

  LearnArgs learn;
  auto* l = app.add_subcommand("learn", "Learn c and m with SGD on N(0,1) samples (CSV trajectory)");
  l->add_option("--seed", learn.seed, "PRNG seed")->capture_default_str();
  l->add_option("--samples", learn.samples, "Number of samples")->capture_default_str();
  l->add_option("--init", learn.init, "Initial 8-bit FP format")->capture_default_str();
  l->add_option("--lr-c", learn.lr_c, "Learning rate for c")->capture_default_str();
  l->add_option("--lr-m", learn.lr_m, "Learning rate for m")->capture_default_str();
  l->add_option("--iters", learn.iterations, "SGD iterations")->capture_default_str();
  l->add_flag("--line-search", learn.line_search, "Also run the exhaustive (m, c) line search");
  l->add_option("-o,--output", learn.output, "Trajectory CSV (default stdout); metadata goes to <output>.meta.json");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check the fast quantizer against the nearest-grid-point oracle");
  v->add_option("--trials", verify.trials, "Random inputs per configuration")->capture_default_str();
  v->add_option("--seed", verify.seed, "PRNG seed")->capture_default_str();
  v->add_option("--fault", verify.fault, "Inject a fault into the fast path")
      ->check(CLI::IsMember({"none", "ties-away"}))
      ->capture_default_str();
  v->add_option("--max-examples", verify.max_examples, "Counterexamples listed per configuration")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) cmd_grid(grid, out);
    if (*s) cmd_mse_sweep(sweep, out);
    if (*d) cmd_dotprod(dot, out);
    if (*q) {
      if (!quant.search && quant.format.empty()) throw ParseError("quantize needs --format or --search");
      cmd_quantize(quant, out);
    }
    if (*se) cmd_search(search, out);
    if (*l) cmd_learn(learn, out);
    if (*v) cmd_verify(verify, out);
  } catch (const VerifyFailed&) {
    return kExitVerifyFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace fpq::cli
