#include "rtdyn/blending.hpp"
#include "rtdyn/config.hpp"
#include "rtdyn/csv.hpp"
#include "rtdyn/edr.hpp"
#include "rtdyn/features.hpp"
#include "rtdyn/simgen.hpp"
#include "rtdyn/sst.hpp"
#include "rtdyn/stats.hpp"
#include "rtdyn/vmwav.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

using namespace rtdyn;

namespace {

constexpr const char* kConfigEnv = "RTDYN_CONFIG";

// Stage failures carry the stage name to the top-level handler.
struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& what) : std::runtime_error(stage + ": " + what) {}
};

template <typename F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

struct Overrides {
  std::vector<std::pair<std::string, std::string>> items;  // in command-line order
};

void knob(CLI::App* sub, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.items.emplace_back(key, v); }, help + " [" + key + "]");
}

void generic_set(CLI::App* sub, Overrides& o) {
  sub->add_option_function<std::vector<std::string>>(
      "--set",
      [&o](const std::vector<std::string>& kvs) {
        for (const auto& kv : kvs) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
          o.items.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        }
      },
      "Any config key as key=value (repeatable)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Defaults, then the config file, then flags.
PipelineConfig resolve_config(const std::string& config_path, const Overrides& o) {
  return stage("config", [&] {
    PipelineConfig cfg;
    std::string path = config_path;
    if (path.empty())
      if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
    if (!path.empty()) apply_config_text(cfg, slurp(path));
    for (const auto& [k, v] : o.items) set_config_value(cfg, k, v);
    cfg.validate();
    return cfg;
  });
}

void progress(const std::string& msg) { std::cerr << "rtdyn: " << msg << '\n'; }

// Sample period of a uniform time column.
double uniform_step(const Eigen::VectorXd& t) {
  if (t.size() < 2) throw std::invalid_argument("need at least two samples");
  const double dt = (t[t.size() - 1] - t[0]) / static_cast<double>(t.size() - 1);
  if (!(dt > 0)) throw std::invalid_argument("time must increase");
  for (Eigen::Index i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) throw std::invalid_argument("time column is not uniformly sampled");
  return dt;
}

struct UniformInput {
  Eigen::VectorXd values;
  double t0 = 0.0, dt = 0.0;
};

UniformInput load_uniform(const std::string& csv, const std::string& raw, double raw_dt, const std::string& value_col) {
  UniformInput u;
  if (!raw.empty()) {
    std::ifstream in(raw);
    if (!in) throw std::invalid_argument("cannot open '" + raw + "'");
    u.values = read_values(in, raw);
    u.dt = raw_dt;
    return u;
  }
  const Table t = read_csv_file(csv);
  require_columns(t, {"time", value_col}, csv);
  const Eigen::VectorXd time = t.column("time");
  u.values = t.column(value_col);
  u.dt = uniform_step(time);
  u.t0 = time[0];
  return u;
}

void write_table(const std::string& path, const Table& t) {
  write_csv_file(path, t);
  progress("wrote " + path + " (" + std::to_string(t.data.rows()) + " rows)");
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---- interp ----
struct InterpArgs {
  std::string input, output, spline;
  bool stream = false;
};

void run_interp(const PipelineConfig& cfg, const InterpArgs& a) {
  const Table in = stage("read", [&] { return read_csv_file(a.input); });
  stage("read", [&] { require_columns(in, {"time", "value"}, a.input); return 0; });
  const Eigen::VectorXd t = in.column("time"), x = in.column("value");
  const SplineCurve curve = stage("interp", [&] {
    if (!a.stream) return blend_interpolate(t, x, cfg.order);
    BlendingStream s(cfg.order);
    for (Eigen::Index i = 0; i < t.size(); ++i) s.push(t[i], x[i]);
    s.finish();
    return s.curve();
  });
  if (!a.spline.empty()) {
    const Eigen::Index K = curve.knots.size();
    Eigen::VectorXd idx = Eigen::VectorXd::LinSpaced(K, 0, static_cast<double>(K - 1));
    Eigen::VectorXd c = Eigen::VectorXd::Constant(K, std::nan(""));
    c.head(curve.coeffs.size()) = curve.coeffs;
    write_table(a.spline, make_table({"index", "knot", "coefficient"}, {idx, curve.knots, c}));
  }
  if (!a.output.empty()) {
    const double step = 1.0 / cfg.eta;
    const auto count = static_cast<Eigen::Index>(std::floor((t[t.size() - 1] - t[0]) / step + 1e-9)) + 1;
    Eigen::VectorXd tt(count), yy(count);
    for (Eigen::Index j = 0; j < count; ++j) {
      tt[j] = t[0] + j * step;
      yy[j] = eval_spline_curve(curve, tt[j]);
    }
    write_table(a.output, make_table({"time", "value"}, {tt, yy}));
  }
}

// ---- wavelet ----
struct WaveletArgs {
  std::string output, spectrum;
  double step = 0.01;
};

void run_wavelet(const PipelineConfig& cfg, const WaveletArgs& a) {
  const int support = cfg.m + cfg.n;
  if (!a.output.empty()) {
    const auto count = static_cast<Eigen::Index>(std::floor(support / a.step));
    // Half-step offset keeps nodes off the integer knots.
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(count, 0.5 * a.step, (count - 0.5) * a.step);
    const Eigen::VectorXcd z = stage("wavelet", [&] { return analytic_vm(cfg.m, cfg.n, x); });
    write_table(a.output, make_table({"x", "psi", "hilbert"}, {x, z.real(), z.imag()}));
  }
  const SpectrumReport rep = stage("spectrum", [&] { return spectrum_and_slr(interior_vm(cfg.m, cfg.n, 1.0)); });
  if (!a.spectrum.empty()) write_table(a.spectrum, make_table({"omega", "magnitude"}, {rep.omega, rep.magnitude}));
  std::cout << "m=" << cfg.m << "\nn=" << cfg.n << "\nslr_db=" << format_number(rep.slr_db) << '\n';
}

// ---- sst ----
struct SSTArgs {
  std::string input, raw, column = "value", output, summary;
  bool sparse = false;
};

void run_sst(PipelineConfig cfg, const SSTArgs& a) {
  const UniformInput u = stage("read", [&] { return load_uniform(a.input, a.raw, cfg.dt, a.column); });
  if (std::abs(u.dt - cfg.dt) > 1e-9 * cfg.dt) {
    progress("using the input sample period " + format_number(u.dt) + " s");
    cfg.dt = u.dt;
    stage("config", [&] { cfg.validate(); return 0; });
  }
  const SSTConfig sc = cfg.sst();
  progress("building analysis matrices (" + std::to_string(sc.rows()) + " scales x " + std::to_string(sc.N()) + ")");
  auto mats = stage("sst", [&] { return std::make_shared<const AnalysisMatrices>(build_matrices(sc)); });
  SSTEngine engine(sc, mats, u.t0);

  std::ofstream map_out, sum_out;
  if (!a.output.empty()) {
    map_out.open(a.output);
    if (!map_out) throw StageError("write", "cannot write '" + a.output + "'");
    map_out << "frame_time,freq,power\n";
  }
  if (!a.summary.empty()) {
    sum_out.open(a.summary);
    if (!sum_out) throw StageError("write", "cannot write '" + a.summary + "'");
    sum_out << "frame_time,top_freq,top_power\n";
  }
  long frames = 0;
  stage("sst", [&] {
    for (Eigen::Index i = 0; i < u.values.size(); ++i) {
      const auto f = engine.push(u.values[i]);
      if (!f) continue;
      ++frames;
      const std::string ft = format_number(f->time);
      if (map_out.is_open())
        for (int k = 1; k <= sc.n_xi; ++k) {
          const double p = f->V[k - 1];
          if (a.sparse && p == 0.0) continue;
          map_out << ft << ',' << format_number(sc.bin_freq(k)) << ',' << format_number(p) << '\n';
        }
      if (sum_out.is_open()) {
        Eigen::Index k;
        const double p = f->V.maxCoeff(&k);
        sum_out << ft << ',' << format_number(sc.bin_freq(static_cast<int>(k) + 1)) << ',' << format_number(p) << '\n';
      }
    }
    return 0;
  });
  if (frames == 0) throw StageError("sst", "input shorter than one analysis window (" + std::to_string(sc.N()) + " samples)");
  progress(std::to_string(frames) + " frames");
}

// ---- edr ----
struct EDRArgs {
  std::string input, raw, peaks, output;
  double fs = 0.0;
  bool stream = false;
};

void run_edr(const PipelineConfig& cfg, const EDRArgs& a) {
  ECGRecord ecg = stage("read", [&] {
    if (!a.raw.empty() && !(a.fs > 0)) throw std::invalid_argument("--raw needs --fs");
    const UniformInput u = load_uniform(a.input, a.raw, a.raw.empty() ? 0.0 : 1.0 / a.fs, "mV");
    ECGRecord r;
    r.fs = 1.0 / u.dt;
    r.t0 = u.t0;
    r.samples = u.values;
    return r;
  });
  ecg = stage("baseline", [&] { return remove_baseline(ecg, cfg.baseline_window); });
  PeakList peaks = stage("peaks", [&] { return detect_peaks(ecg, cfg.peak_polarity(), cfg.detector()); });
  const std::size_t detected = peaks.size();
  if (cfg.pvc) peaks = stage("pvc", [&] { return exclude_pvc(peaks, cfg.pvc_ratio, cfg.pvc_history); });
  progress(std::to_string(detected) + " peaks, " + std::to_string(detected - peaks.size()) + " excluded");
  if (!a.peaks.empty())
    write_table(a.peaks, make_table({"time", "amplitude"}, {to_vec(peaks.times), to_vec(peaks.amplitudes)}));
  if (a.output.empty()) return;
  std::vector<double> tt, vv;
  stage("edr", [&] {
    if (a.stream) {
      EDRStream s(cfg.order, cfg.eta);
      auto take = [&](const std::vector<std::pair<double, double>>& out) {
        for (const auto& [t, v] : out) {
          tt.push_back(t);
          vv.push_back(v);
        }
      };
      for (std::size_t i = 0; i < peaks.size(); ++i) take(s.push(peaks.times[i], peaks.amplitudes[i]));
      take(s.finish());
    } else {
      const EDRWaveform w = build_edr(peaks, cfg.order, cfg.eta);
      for (Eigen::Index j = 0; j < w.values.size(); ++j) {
        tt.push_back(w.t0 + j * w.dt);
        vv.push_back(w.values[j]);
      }
    }
    return 0;
  });
  write_table(a.output, make_table({"time", "value"}, {to_vec(tt), to_vec(vv)}));
}

// ---- nrr ----
struct NRRArgs {
  std::string tfmap, signal, ridge, output;
};

struct LoadedMap {
  Eigen::VectorXd times, freqs;
  Eigen::MatrixXd V;
};

LoadedMap load_tfmap(const std::string& path, const SSTConfig& sc) {
  const Table t = read_csv_file(path);
  require_columns(t, {"frame_time", "freq", "power"}, path);
  const Eigen::VectorXd ft = t.column("frame_time"), fq = t.column("freq"), pw = t.column("power");
  std::vector<double> times;
  std::map<double, Eigen::Index> frame_of;
  for (Eigen::Index r = 0; r < ft.size(); ++r)
    if (frame_of.emplace(ft[r], static_cast<Eigen::Index>(times.size())).second) times.push_back(ft[r]);
  LoadedMap m;
  m.times = to_vec(times);
  m.freqs.resize(sc.n_xi);
  for (int k = 1; k <= sc.n_xi; ++k) m.freqs[k - 1] = sc.bin_freq(k);
  m.V = Eigen::MatrixXd::Zero(m.times.size(), sc.n_xi);
  for (Eigen::Index r = 0; r < ft.size(); ++r) {
    const double pos = (fq[r] - sc.f_lo()) / sc.bin_width();
    const long k = std::lround(pos);
    if (std::abs(pos - k) > 1e-6 || k < 1 || k > sc.n_xi)
      throw std::invalid_argument(path + ": frequency " + format_number(fq[r]) +
                                  " is not on the configured grid (check dt, lag, n_xi)");
    m.V(frame_of.at(ft[r]), k - 1) = pw[r];
  }
  return m;
}

void run_nrr(const PipelineConfig& cfg, const NRRArgs& a) {
  const SSTConfig sc = cfg.sst();
  LoadedMap m = stage("read", [&] {
    if (!a.tfmap.empty()) return load_tfmap(a.tfmap, sc);
    const UniformInput u = load_uniform(a.signal, "", 0.0, "value");
    if (std::abs(u.dt - sc.dt) > 1e-9 * sc.dt)
      throw std::invalid_argument("signal sample period " + format_number(u.dt) + " differs from dt");
    const TFMap map = sst_batch(sc, u.values, u.t0);
    return LoadedMap{map.times, map.freqs, map.V};
  });
  if (m.times.size() == 0) throw StageError("nrr", "empty time-frequency map");
  const NRRParams p = cfg.nrr();
  const RidgeCurve ridge = stage("ridge", [&] { return extract_ridge_above(m.V, m.freqs, cfg.lambda, p); });
  const NRRSeries s = stage("nrr", [&] { return nrr_series(m.V, m.freqs, ridge, p); });
  if (!a.ridge.empty()) {
    Eigen::VectorXd f(m.times.size());
    for (Eigen::Index l = 0; l < f.size(); ++l) f[l] = m.freqs[ridge.bins[l] - 1];
    write_table(a.ridge, make_table({"frame_time", "freq"}, {m.times, f}));
  }
  if (!a.output.empty()) write_table(a.output, make_table({"frame_time", "P_r", "P_nr", "NRR"}, {m.times, s.p_r, s.p_nr, s.nrr}));
  progress(std::to_string(m.times.size()) + " frames");
}

// ---- pk ----
struct PKArgs {
  std::string input, x = "x", y = "y";
};

void run_pk(const PKArgs& a) {
  const Table t = stage("read", [&] {
    Table r = read_csv_file(a.input);
    require_columns(r, {a.x, a.y}, a.input);
    return r;
  });
  const Eigen::VectorXd x = t.column(a.x), y = t.column(a.y);
  const PairCounts c = stage("pk", [&] { return classify_pairs(x, y); });
  const auto pk = stage("pk", [&] { return prediction_probability(x, y); });
  std::cout << "pairs: concordant=" << c.concordant << " discordant=" << c.discordant << " tie_x=" << c.tie_x
            << " tie_y=" << c.tie_y << " tie_both=" << c.tie_both << '\n';
  if (pk) {
    long num = 2 * c.concordant + c.tie_x, den = 2 * (c.concordant + c.discordant + c.tie_x);
    const long g = std::gcd(num, den);
    std::cout << "P_K=" << format_number(*pk) << " (" << num / g << "/" << den / g << ")\n";
  } else {
    std::cout << "P_K=nan\n";
  }
  try {
    std::cout << "spearman=" << format_number(spearman(x, y)) << '\n';
  } catch (const std::domain_error&) {
    std::cout << "spearman=nan\n";
  }
}

// ---- effectsite ----
struct EffectArgs {
  std::string input, output, hold = "constant";
  double c0 = 0.0;
};

void run_effectsite(const PipelineConfig& cfg, const EffectArgs& a) {
  const Table t = stage("read", [&] {
    Table r = read_csv_file(a.input);
    require_columns(r, {"time", "c_et"}, a.input);
    return r;
  });
  const InputHold hold = a.hold == "linear" ? InputHold::Linear : InputHold::Constant;
  const Eigen::VectorXd time = t.column("time");
  const Eigen::VectorXd ce = stage("effectsite", [&] { return effect_site(time, t.column("c_et"), cfg.ke0, a.c0, hold); });
  write_table(a.output, make_table({"time", "c_eff"}, {time, ce}));
}

// ---- simulate ----
struct SimArgs {
  std::string output, truth, kind = "imt";
  double tone = 1.0;
};

void run_simulate(const PipelineConfig& cfg, const SimArgs& a) {
  if (a.kind == "ecg") {
    SyntheticECGParams p;
    p.duration = cfg.sim_duration;
    p.seed = cfg.seed;
    const double amp_sd = std::isinf(cfg.snr_db) ? 0.0 : std::pow(10.0, -cfg.snr_db / 20.0);
    p.noise_sd = amp_sd;
    const SyntheticECG s = stage("simulate", [&] { return synthetic_ecg(p); });
    const Eigen::Index n = s.ecg.samples.size();
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0, (n - 1) / s.ecg.fs);
    write_table(a.output, make_table({"time", "mV"}, {t, s.ecg.samples}));
    if (!a.truth.empty()) {
      const Eigen::VectorXd bt = to_vec(s.beat_times), ba = to_vec(s.beat_amps);
      write_table(a.truth, make_table({"time", "amplitude"}, {bt, ba}));
    }
    return;
  }
  const SyntheticSignal sig = stage("simulate", [&] {
    if (a.kind == "tone") {
      const int M = static_cast<int>(std::floor(cfg.sim_duration / cfg.sim_dt + 1e-9));
      SimComponent c;
      const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(M, cfg.sim_dt, M * cfg.sim_dt);
      c.amp = Eigen::VectorXd::Ones(M);
      c.phase = a.tone * t;
      c.inst_freq = Eigen::VectorXd::Constant(M, a.tone);
      c.mask = Eigen::VectorXd::Ones(M);
      c.values = (2 * M_PI * c.phase.array()).cos().matrix();
      return compose(cfg.sim_dt, {c}, Eigen::VectorXd::Zero(M), cfg.seed, cfg.snr_db);
    }
    if (a.kind != "imt") throw std::invalid_argument("unknown kind '" + a.kind + "'");
    SimConfig sc = SimConfig::two_component();
    sc.dt = cfg.sim_dt;
    sc.duration = cfg.sim_duration;
    sc.snr_db = cfg.snr_db;
    sc.seed = cfg.seed;
    return simulate(sc);
  });
  write_table(a.output, make_table({"time", "value"}, {sig.times, sig.Y}));
  if (a.truth.empty()) return;
  std::vector<std::string> cols{"time"};
  std::vector<Eigen::VectorXd> data{sig.times};
  for (std::size_t c = 0; c < sig.components.size(); ++c) {
    const std::string s = std::to_string(c + 1);
    for (const char* name : {"if_", "amp_", "mask_", "component_"}) cols.push_back(name + s);
    data.push_back(sig.components[c].inst_freq);
    data.push_back(sig.components[c].amp);
    data.push_back(sig.components[c].mask);
    data.push_back(sig.components[c].values.cwiseProduct(sig.components[c].mask));
  }
  cols.insert(cols.end(), {"trend", "noise"});
  data.push_back(sig.trend);
  data.push_back(sig.noise);
  write_table(a.truth, make_table(cols, data));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time spline, wavelet and synchrosqueezing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::string config_path;
  app.add_option("--config", config_path,
                 std::string("key=value config file (default: $") + kConfigEnv + " if set)");
  bool dump = false;
  app.add_flag("--print-config", dump, "Print the resolved configuration to standard error");
  Overrides ov;

  InterpArgs ia;
  auto* interp = app.add_subcommand("interp", "Blending interpolation of irregular samples (time,value)");
  interp->add_option("-i,--input", ia.input, "Input CSV with time,value")->required();
  interp->add_option("-o,--output", ia.output, "Dense resampled series CSV (time,value) at eta Hz");
  interp->add_option("--spline", ia.spline, "Spline CSV (index,knot,coefficient)");
  interp->add_flag("--stream", ia.stream, "Use the causal streaming operator");
  knob(interp, ov, "--order", "order", "Spline order");
  knob(interp, ov, "--eta", "eta", "Resampling rate in Hz");

  WaveletArgs wa;
  auto* wavelet = app.add_subcommand("wavelet", "Analytic wavelet samples and spectrum report");
  wavelet->add_option("-o,--output", wa.output, "Samples CSV (x,psi,hilbert)");
  wavelet->add_option("--spectrum", wa.spectrum, "Spectrum CSV (omega,magnitude)");
  wavelet->add_option("--step", wa.step, "Sample spacing")->check(CLI::PositiveNumber);
  knob(wavelet, ov, "--m", "m", "Spline order");
  knob(wavelet, ov, "--n", "n", "Vanishing moments");

  SSTArgs sa;
  auto* sst = app.add_subcommand("sst", "Streaming synchrosqueezed transform");
  auto* sst_in = sst->add_option("-i,--input", sa.input, "Uniform series CSV (time,<column>)");
  auto* sst_raw = sst->add_option("--raw", sa.raw, "One value per line, sampled every dt");
  sst_in->excludes(sst_raw);
  sst->add_option("--column", sa.column, "Value column name");
  sst->add_option("-o,--output", sa.output, "Time-frequency map CSV (frame_time,freq,power)");
  sst->add_option("--summary", sa.summary, "Per-frame top bin CSV (frame_time,top_freq,top_power)");
  sst->add_flag("--sparse", sa.sparse, "Omit zero-power rows from the map");
  knob(sst, ov, "--dt", "dt", "Sample period in seconds");
  knob(sst, ov, "--lag", "lag", "Lag L in seconds");
  knob(sst, ov, "--m", "m", "Spline order");
  knob(sst, ov, "--n", "n", "Vanishing moments");
  knob(sst, ov, "--n-xi", "n_xi", "Frequency bins");

  EDRArgs ea;
  auto* edr = app.add_subcommand("edr", "ECG-derived respiration from R or S peak amplitudes");
  auto* edr_in = edr->add_option("-i,--input", ea.input, "ECG CSV (time,mV)");
  auto* edr_raw = edr->add_option("--raw", ea.raw, "One mV value per line");
  edr_in->excludes(edr_raw);
  edr->add_option("--fs", ea.fs, "Sampling rate for --raw in Hz");
  edr->add_option("--peaks", ea.peaks, "Peak list CSV (time,amplitude)");
  edr->add_option("-o,--output", ea.output, "EDR CSV (time,value)");
  edr->add_flag("--stream", ea.stream, "Use the causal streaming interpolant");
  knob(edr, ov, "--polarity", "polarity", "R or S");
  knob(edr, ov, "--pvc", "pvc", "Premature beat exclusion on/off");
  knob(edr, ov, "--eta", "eta", "EDR rate in Hz");
  knob(edr, ov, "--order", "order", "Spline order");

  NRRArgs na;
  auto* nrr = app.add_subcommand("nrr", "Ridge and non-rhythmic to rhythmic ratio");
  auto* nrr_map = nrr->add_option("--tfmap", na.tfmap, "Time-frequency map CSV (frame_time,freq,power)");
  auto* nrr_sig = nrr->add_option("--signal", na.signal, "Uniform series CSV (time,value); transformed first");
  nrr_map->excludes(nrr_sig);
  nrr->add_option("--ridge", na.ridge, "Ridge CSV (frame_time,freq)");
  nrr->add_option("-o,--output", na.output, "NRR CSV (frame_time,P_r,P_nr,NRR)");
  knob(nrr, ov, "--lambda", "lambda", "Ridge smoothness penalty");
  knob(nrr, ov, "--dt", "dt", "Sample period of the analysed series");
  knob(nrr, ov, "--lag", "lag", "Lag L in seconds");
  knob(nrr, ov, "--n-xi", "n_xi", "Frequency bins");

  PKArgs pa;
  auto* pk = app.add_subcommand("pk", "Prediction probability and Spearman correlation");
  pk->add_option("-i,--input", pa.input, "CSV with indicator and reference columns")->required();
  pk->add_option("--x", pa.x, "Indicator column");
  pk->add_option("--y", pa.y, "Reference column");

  EffectArgs fa;
  auto* eff = app.add_subcommand("effectsite", "Effect-site concentration from end-tidal samples");
  eff->add_option("-i,--input", fa.input, "CSV (time,c_et), time in seconds")->required();
  eff->add_option("-o,--output", fa.output, "CSV (time,c_eff)")->required();
  eff->add_option("--hold", fa.hold, "Input between samples")->check(CLI::IsMember({"constant", "linear"}));
  eff->add_option("--c0", fa.c0, "Initial effect-site concentration");
  knob(eff, ov, "--ke0", "ke0", "Rate constant per minute");

  SimArgs ma;
  auto* sim = app.add_subcommand("simulate", "Synthetic signals with ground truth");
  sim->add_option("-o,--output", ma.output, "Composite CSV (time,value), or (time,mV) for ecg")->required();
  sim->add_option("--truth", ma.truth, "Ground-truth CSV");
  sim->add_option("--kind", ma.kind, "imt, tone or ecg")->check(CLI::IsMember({"imt", "tone", "ecg"}));
  sim->add_option("--tone", ma.tone, "Tone frequency in Hz for --kind tone");
  knob(sim, ov, "--seed", "seed", "Random seed");
  knob(sim, ov, "--snr", "snr_db", "SNR in dB (inf for none)");
  knob(sim, ov, "--dt", "sim_dt", "Sample period");
  knob(sim, ov, "--duration", "sim_duration", "Duration in seconds");

  for (auto* sub : {interp, wavelet, sst, edr, nrr, pk, eff, sim}) generic_set(sub, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    const PipelineConfig cfg = resolve_config(config_path, ov);
    if (dump) std::cerr << canonical_config(cfg);
    if (*interp) run_interp(cfg, ia);
    if (*wavelet) run_wavelet(cfg, wa);
    if (*sst) {
      if (sa.input.empty() && sa.raw.empty()) throw StageError("read", "one of --input or --raw is required");
      run_sst(cfg, sa);
    }
    if (*edr) {
      if (ea.input.empty() && ea.raw.empty()) throw StageError("read", "one of --input or --raw is required");
      run_edr(cfg, ea);
    }
    if (*nrr) {
      if (na.tfmap.empty() && na.signal.empty()) throw StageError("read", "one of --tfmap or --signal is required");
      run_nrr(cfg, na);
    }
    if (*pk) run_pk(pa);
    if (*eff) run_effectsite(cfg, fa);
    if (*sim) run_simulate(cfg, ma);
  } catch (const std::exception& e) {
    std::cerr << "rtdyn: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
