#include "faic/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "faic/designs.hpp"
#include "faic/detector.hpp"

namespace faic {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing characters");
  return d;
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  const long long i = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing characters");
  return i;
}

std::uint64_t to_u64(const std::string& v) {
  if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative value");
  std::size_t used = 0;
  const auto u = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing characters");
  return u;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected true/false");
}

// "a, b, c" or "start:step:stop" (inclusive).
std::vector<double> parse_grid(const std::string& v) {
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be start:step:stop");
    const double start = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double stop = to_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("range needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long q = 0; q <= count; ++q) out.push_back(start + static_cast<double>(q) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(v, ',')) {
    if (!item.empty()) out.push_back(to_double(item));
  }
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::vector<double> equal_powers(std::size_t users, double snr_db) {
  return std::vector<double>(users, NoiseSpec::power_for_snr_db(snr_db));
}

bool uniform_antennas(const ChannelSet& ch) {
  for (std::size_t j = 0; j < ch.users(); ++j) {
    if (ch.n_t(j) != ch.n_t(0) || ch.n_r(j) != ch.n_r(0)) return false;
  }
  return true;
}

PrecoderSet build_precoders(Method method, const Problem& prob, std::span<const double> powers,
                            const ExperimentConfig& cfg, const McConfig& mc) {
  const NoiseSpec noise;
  switch (method) {
    case Method::FiniteOpt:
      return multistart(finite_objective(prob.channel, prob.tables, noise, prob.weights, mc), prob.channel, powers,
                        cfg.optimizer)
          .precoders;
    case Method::GaussianOpt:
      return multistart(gaussian_objective(prob.channel, noise, prob.weights), prob.channel, powers, cfg.optimizer)
          .precoders;
    case Method::LowSnr: return low_snr_design(prob.channel, powers);
    case Method::HighSnr: return high_snr_design(prob.channel, prob.tables, powers).precoders;
    case Method::Identity: return scaled_identity_precoders(prob.channel, powers);
    case Method::IaLoss: break;
  }
  throw Error("method " + to_string(method) + " does not construct precoders");
}

IaAccounting ia_for(const Problem& prob) {
  const ChannelSet& ch = prob.channel;
  if (!uniform_antennas(ch)) throw Error("ia-loss requires equal antenna counts for every user");
  std::vector<double> sizes;
  for (const auto& t : prob.tables) sizes.push_back(static_cast<double>(t.size()));
  return ia_rate_loss(static_cast<int>(ch.users()), ch.n_t(0), ch.n_r(0), sizes);
}

std::vector<SweepRow> sweep_point(const ExperimentConfig& cfg, const Problem& prob, double snr, Method method,
                                  const McConfig& mc) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t users = prob.channel.users();
  std::vector<SweepRow> rows;
  if (method == Method::IaLoss) {
    const auto acc = ia_for(prob);
    const double fraction = acc.eta / (acc.eta + 1.0);
    for (std::size_t j = 0; j < users; ++j) {
      rows.push_back({snr, std::to_string(j + 1), method, fraction * std::log2(double(prob.tables[j].size())), 0.0, 0.0});
    }
    rows.push_back({snr, "sum", method, acc.limit, 0.0, 0.0});
  } else {
    const auto powers = equal_powers(users, snr);
    const PrecoderSet pre = build_precoders(method, prob, powers, cfg, mc);
    double sum = 0.0;
    double var = 0.0;
    for (std::size_t j = 0; j < users; ++j) {
      const auto r = finite_rate(prob.channel, pre, prob.tables, NoiseSpec{}, j, mc);
      rows.push_back({snr, std::to_string(j + 1), method, r.value, r.std_error, 0.0});
      sum += r.value;
      var += r.std_error * r.std_error;
    }
    rows.push_back({snr, "sum", method, sum, std::sqrt(var), 0.0});
  }
  if (cfg.timing) {
    const double ms = elapsed_ms(start);
    for (auto& r : rows) r.wall_ms = ms;
  }
  return rows;
}

void write_precoders(std::ostream& out, const PrecoderSet& pre) {
  for (std::size_t j = 0; j < pre.users(); ++j) write_matrix_block(out, "G_" + std::to_string(j + 1), pre.G[j], 4);
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::FiniteOpt: return "finite-opt";
    case Method::GaussianOpt: return "gaussian-opt";
    case Method::LowSnr: return "low-snr";
    case Method::HighSnr: return "high-snr";
    case Method::IaLoss: return "ia-loss";
    case Method::Identity: return "identity";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::FiniteOpt, Method::GaussianOpt, Method::LowSnr, Method::HighSnr, Method::IaLoss,
                   Method::Identity}) {
    if (to_string(m) == name) return m;
  }
  throw Error("unknown method '" + name + "'");
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  int section_user = 0;
  bool snr_seen = false;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto fail = [&](const std::string& msg) { return Error(source + ":" + std::to_string(lineno) + ": " + msg); };
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("unterminated section header");
      const auto words = split(trim(line.substr(1, line.size() - 2)), ' ');
      std::vector<std::string> tokens;
      for (const auto& w : words) {
        if (!w.empty()) tokens.push_back(w);
      }
      if (tokens.size() != 2 || tokens[0] != "user") throw fail("expected section header [user N]");
      try {
        section_user = static_cast<int>(to_int(tokens[1]));
      } catch (const std::exception&) {
        throw fail("invalid user index '" + tokens[1] + "'");
      }
      if (section_user < 1) throw fail("user index must be >= 1");
      cfg.users[section_user];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw fail("empty key");
    if (value.empty()) throw fail("empty value for '" + key + "'");

    try {
      if (section_user > 0) {
        auto& u = cfg.users[section_user];
        if (key == "modulation") {
          parse_constellation(value);
          u.modulation = value;
        } else if (key == "weight") {
          u.weight = to_double(value);
        } else {
          throw fail("unknown key '" + key + "' in [user " + std::to_string(section_user) + "]");
        }
        continue;
      }
      if (key == "fixture") {
        cfg.fixture = value;
      } else if (key == "channel_file") {
        cfg.channel_file = value;
      } else if (key == "modulation") {
        parse_constellation(value);
        cfg.modulation = value;
      } else if (key == "snr_db") {
        cfg.snr_db = parse_grid(value);
        snr_seen = true;
      } else if (key == "method" || key == "methods") {
        cfg.methods.clear();
        for (const auto& m : split(value, ',')) cfg.methods.push_back(parse_method(m));
      } else if (key == "samples") {
        const auto n = to_int(value);
        if (n < 1) throw fail("samples must be >= 1");
        cfg.mc.samples = static_cast<std::size_t>(n);
      } else if (key == "seed") {
        cfg.mc.seed = to_u64(value);
        cfg.optimizer.seed = cfg.mc.seed;
      } else if (key == "mc_seed") {
        cfg.mc.seed = to_u64(value);
      } else if (key == "init_seed") {
        cfg.optimizer.seed = to_u64(value);
      } else if (key == "threads") {
        cfg.mc.threads = static_cast<unsigned>(to_u64(value));
      } else if (key == "alpha") {
        cfg.optimizer.alpha = to_double(value);
      } else if (key == "beta") {
        cfg.optimizer.beta = to_double(value);
      } else if (key == "c_min") {
        cfg.optimizer.c_min = to_double(value);
      } else if (key == "max_outer") {
        cfg.optimizer.max_outer = static_cast<int>(to_int(value));
      } else if (key == "rel_tol") {
        cfg.optimizer.rel_tol = to_double(value);
      } else if (key == "restarts") {
        cfg.optimizer.restarts = static_cast<int>(to_int(value));
      } else if (key == "resample_each_sweep") {
        cfg.optimizer.resample_each_sweep = to_bool(value);
      } else if (key == "output") {
        cfg.output = value;
      } else if (key == "trace_output") {
        cfg.trace_output = value;
      } else if (key == "timing") {
        cfg.timing = to_bool(value);
      } else if (key == "reference_precoders") {
        cfg.reference_precoders = value;
      } else if (key == "objective") {
        if (value != "finite" && value != "gaussian") throw fail("objective must be 'finite' or 'gaussian'");
        cfg.objective = value;
      } else if (key == "tolerance") {
        cfg.tolerance = to_double(value);
      } else if (key == "fd_step") {
        cfg.fd_step = to_double(value);
      } else if (key == "random_users") {
        cfg.random_users = static_cast<int>(to_int(value));
      } else if (key == "random_antennas") {
        cfg.random_antennas = static_cast<int>(to_int(value));
      } else if (key == "channel_seed") {
        cfg.channel_seed = to_u64(value);
      } else if (key == "symbols") {
        cfg.symbols = static_cast<int>(to_int(value));
      } else if (key == "detect_user") {
        const auto u = to_int(value);
        if (u < 1) throw fail("detect_user must be >= 1");
        cfg.detect_user = static_cast<std::size_t>(u);
      } else {
        throw fail("unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.rfind(source + ":", 0) == 0) throw;
      throw fail(msg);
    } catch (const std::exception&) {
      throw fail("invalid value '" + value + "' for '" + key + "'");
    }
  }
  if (!snr_seen) throw Error(source + ": missing required key 'snr_db'");
  if (cfg.snr_db.empty()) throw Error(source + ": SNR grid is empty");
  if (cfg.methods.empty()) throw Error(source + ": no method given");
  try {
    cfg.optimizer.validate();
  } catch (const Error& e) {
    throw Error(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

Problem resolve_problem(const ExperimentConfig& cfg) {
  Problem prob;
  if (cfg.random_users > 0) {
    prob.channel = random_channel(static_cast<std::size_t>(cfg.random_users), cfg.random_antennas,
                                  cfg.random_antennas, cfg.channel_seed);
  } else if (!cfg.channel_file.empty()) {
    prob.channel = channel_from_blocks(read_matrix_file(cfg.channel_file));
  } else {
    prob.channel = load_fixture(cfg.fixture).first;
  }
  const std::size_t users = prob.channel.users();
  for (const auto& [idx, section] : cfg.users) {
    if (static_cast<std::size_t>(idx) > users) {
      throw Error("config has a [user " + std::to_string(idx) + "] section but the channel has " +
                  std::to_string(users) + " users");
    }
  }
  prob.weights.mu.assign(users, 1.0);
  bool any_weight = false;
  for (std::size_t j = 0; j < users; ++j) {
    std::string mod = cfg.modulation;
    if (const auto it = cfg.users.find(static_cast<int>(j + 1)); it != cfg.users.end()) {
      if (it->second.modulation) mod = *it->second.modulation;
      if (it->second.weight) {
        prob.weights.mu[j] = *it->second.weight;
        any_weight = true;
      }
    }
    prob.tables.push_back(product_space(parse_constellation(mod), prob.channel.n_t(j)));
  }
  if (any_weight) prob.weights.validate(users);
  checked_joint_size(prob.tables);
  return prob;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  const Problem prob = resolve_problem(cfg);
  struct Task {
    double snr;
    Method method;
  };
  std::vector<Task> tasks;
  for (double snr : cfg.snr_db) {
    for (Method m : cfg.methods) tasks.push_back({snr, m});
  }
  const unsigned outer = resolve_threads(cfg.mc.threads);
  McConfig mc = cfg.mc;
  if (outer > 1) mc.threads = 1;
  std::vector<std::vector<SweepRow>> parts(tasks.size());
  parallel_for(tasks.size(), outer, [&](std::size_t t) {
    try {
      parts[t] = sweep_point(cfg, prob, tasks[t].snr, tasks[t].method, mc);
    } catch (const Error& e) {
      throw Error("SNR " + format_fixed(tasks[t].snr, 2) + " dB, method " + to_string(tasks[t].method) + ": " +
                  e.what());
    }
  });
  std::vector<SweepRow> rows;
  for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  const auto user_key = [](const std::string& u) { return u == "sum" ? 1 << 30 : std::stoi(u); };
  std::stable_sort(rows.begin(), rows.end(), [&](const SweepRow& a, const SweepRow& b) {
    if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
    if (a.method != b.method) return to_string(a.method) < to_string(b.method);
    return user_key(a.user) < user_key(b.user);
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_fixed(r.snr_db, 2) << ',' << r.user << ',' << to_string(r.method) << ','
        << format_fixed(r.rate_bits, 6) << ',' << format_fixed(r.std_error, 6) << ',' << format_fixed(r.wall_ms, 1)
        << '\n';
  }
}

double run_optimize(const ExperimentConfig& cfg, std::ostream& report, std::ostream& trace) {
  const Problem prob = resolve_problem(cfg);
  const ChannelSet& ch = prob.channel;
  const double snr = cfg.snr_db.front();
  const auto powers = equal_powers(ch.users(), snr);
  const Method method = cfg.methods.front();
  if (method != Method::FiniteOpt && method != Method::GaussianOpt) {
    throw Error("optimize supports the finite-opt and gaussian-opt methods only");
  }
  const NoiseSpec noise;
  const WsrObjective objective = method == Method::FiniteOpt
                                     ? finite_objective(ch, prob.tables, noise, prob.weights, cfg.mc)
                                     : gaussian_objective(ch, noise, prob.weights);
  const auto result = multistart(objective, ch, powers, cfg.optimizer);
  const auto final_wsr = finite_wsr(ch, result.precoders, prob.tables, noise, prob.weights, cfg.mc);

  report << "# method " << to_string(method) << ", SNR " << format_fixed(snr, 2) << " dB, P = "
         << format_fixed(powers.front(), 4) << ", restarts " << cfg.optimizer.restarts << ", best restart "
         << result.best + 1 << '\n';
  write_precoders(report, result.precoders);
  for (std::size_t j = 0; j < ch.users(); ++j) {
    report << "# trace_G_" << j + 1 << " = " << format_fixed(result.precoders.trace(j), 8) << '\n';
  }
  report << "# finite_wsr = " << format_fixed(final_wsr.value, 4) << " +- " << format_fixed(final_wsr.std_error, 4)
         << '\n';
  const auto& best = result.traces[result.best];
  report << "# sweeps = " << best.sweeps.size() << ", stop = " << to_string(best.stop) << '\n';
  for (std::size_t j = 0; j < ch.users(); ++j) {
    report << "# kkt_user_" << j + 1 << ": kappa = " << format_fixed(best.kkt.kappa[j], 6)
           << ", stationarity = " << format_fixed(best.kkt.stationarity[j], 6)
           << ", slackness = " << format_fixed(best.kkt.slackness[j], 6) << '\n';
  }
  if (!cfg.reference_precoders.empty()) {
    const PrecoderSet ref = load_precoder_fixture(cfg.reference_precoders);
    const auto ref_wsr = finite_wsr(ch, ref, prob.tables, noise, prob.weights, cfg.mc);
    report << "# reference " << cfg.reference_precoders << " finite_wsr = " << format_fixed(ref_wsr.value, 4)
           << " +- " << format_fixed(ref_wsr.std_error, 4) << '\n';
  }

  trace << "restart,sweep,wsr,backtracks,accepted,projected\n";
  for (std::size_t r = 0; r < result.traces.size(); ++r) {
    const auto& t = result.traces[r];
    trace << r + 1 << ",0," << format_fixed(t.initial_wsr, 6) << ",0,0,0\n";
    for (const auto& s : t.sweeps) {
      int backtracks = 0;
      int accepted = 0;
      int projected = 0;
      for (const auto& u : s.users) {
        backtracks += u.backtracks;
        accepted += u.accepted;
        projected += u.projected;
      }
      trace << r + 1 << ',' << s.sweep << ',' << format_fixed(s.wsr, 6) << ',' << backtracks << ',' << accepted
            << ',' << projected << '\n';
    }
  }
  return final_wsr.value;
}

bool run_gradcheck(const ExperimentConfig& cfg, std::ostream& report) {
  const Problem prob = resolve_problem(cfg);
  const ChannelSet& ch = prob.channel;
  const double snr = cfg.snr_db.front();
  const auto powers = equal_powers(ch.users(), snr);
  const PrecoderSet at = random_precoders(ch, powers, cfg.optimizer.seed);
  const NoiseSpec noise;
  const bool finite = cfg.objective == "finite";
  const double tol = cfg.tolerance > 0.0 ? cfg.tolerance : (finite ? 1e-3 : 1e-6);

  std::vector<CMatrix> analytic;
  std::function<double(const PrecoderSet&)> f;
  if (finite) {
    analytic = finite_wsr_gradients(ch, at, prob.tables, noise, prob.weights, cfg.mc).grad;
    f = [&](const PrecoderSet& p) { return finite_wsr(ch, p, prob.tables, noise, prob.weights, cfg.mc).value; };
  } else {
    analytic = gaussian_wsr_gradients(ch, at, noise, prob.weights);
    f = [&](const PrecoderSet& p) { return gaussian_wsr(ch, p, noise, prob.weights).value; };
  }
  const auto numeric = finite_difference_gradients(f, at, cfg.fd_step);
  bool ok = true;
  report << "objective = " << cfg.objective << ", SNR " << format_fixed(snr, 2) << " dB, tolerance " << tol << '\n';
  for (std::size_t k = 0; k < ch.users(); ++k) {
    const double err = relative_gradient_error(std::span(&analytic[k], 1), std::span(&numeric[k], 1));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", err);
    report << "user " << k + 1 << ": relative error " << buf << (err < tol ? " ok" : " FAIL") << '\n';
    ok = ok && err < tol;
  }
  const double overall = relative_gradient_error(analytic, numeric);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", overall);
  report << "overall: relative error " << buf << (overall < tol ? " ok" : " FAIL") << '\n';
  return ok && overall < tol;
}

void run_design_low(const ExperimentConfig& cfg, std::ostream& report) {
  const Problem prob = resolve_problem(cfg);
  const ChannelSet& ch = prob.channel;
  for (double snr : cfg.snr_db) {
    const auto powers = equal_powers(ch.users(), snr);
    const PrecoderSet pre = low_snr_design(ch, powers);
    report << "# low-SNR design, SNR " << format_fixed(snr, 2) << " dB\n";
    write_precoders(report, pre);
    double first = 0.0;
    double gauss = 0.0;
    for (std::size_t j = 0; j < ch.users(); ++j) {
      first += first_order_rate(ch, pre, NoiseSpec{}, j).value;
      gauss += gaussian_rate(ch, pre, NoiseSpec{}, j).value;
    }
    const auto fin = finite_wsr(ch, pre, prob.tables, NoiseSpec{}, Weights::equal(ch.users()), cfg.mc);
    report << "first_order_sum = " << format_fixed(first, 6) << '\n'
           << "gaussian_sum = " << format_fixed(gauss, 6) << '\n'
           << "finite_sum = " << format_fixed(fin.value, 6) << " +- " << format_fixed(fin.std_error, 6) << '\n';
  }
}

void run_design_high(const ExperimentConfig& cfg, std::ostream& report) {
  const Problem prob = resolve_problem(cfg);
  const ChannelSet& ch = prob.channel;
  for (double snr : cfg.snr_db) {
    const auto powers = equal_powers(ch.users(), snr);
    const HighSnrDesign d = high_snr_design(ch, prob.tables, powers);
    const auto ratios = cascade_ratios(d, ch);
    report << "# high-SNR design, SNR " << format_fixed(snr, 2) << " dB\n";
    for (std::size_t a = 0; a < d.order.size(); ++a) {
      const std::size_t i = d.order[a];
      report << "position " << a + 1 << ": user " << i + 1 << ", epsilon = " << d.epsilon[i]
             << ", omega_min = " << format_fixed(d.omega.min[i], 6) << ", omega_max = "
             << format_fixed(d.omega.max[i], 6) << ", distinct = " << d.omega.distinct[i];
      if (a + 1 < d.order.size()) report << ", cascade ratio = " << format_fixed(ratios[a], 6);
      report << '\n';
    }
    write_precoders(report, d.precoders);
    const auto fin = finite_wsr(ch, d.precoders, prob.tables, NoiseSpec{}, Weights::equal(ch.users()), cfg.mc);
    double cap = 0.0;
    for (const auto& t : prob.tables) cap += std::log2(static_cast<double>(t.size()));
    report << "finite_sum = " << format_fixed(fin.value, 6) << " +- " << format_fixed(fin.std_error, 6)
           << " (saturation " << format_fixed(cap, 6) << ")\n";
  }
}

void run_ia_loss(const ExperimentConfig& cfg, std::ostream& csv) {
  const Problem prob = resolve_problem(cfg);
  const auto acc = ia_for(prob);
  csv << "n,extension,average_rate,limit\n";
  for (const auto& p : acc.head) {
    char ext[64];
    std::snprintf(ext, sizeof ext, "%.6e", p.extension);
    csv << p.n << ',' << ext << ',' << format_fixed(p.average, 6) << ',' << format_fixed(acc.limit, 6) << '\n';
  }
}

DetectSummary run_detect_demo(const ExperimentConfig& cfg, std::ostream& csv) {
  const Problem prob = resolve_problem(cfg);
  const ChannelSet& ch = prob.channel;
  const std::size_t j = cfg.detect_user - 1;
  if (j >= ch.users()) throw Error("detect_user exceeds the user count");
  if (cfg.symbols < 1) throw Error("symbols must be >= 1");
  const double snr = cfg.snr_db.front();
  const auto powers = equal_powers(ch.users(), snr);
  const Method method = cfg.methods.front() == Method::IaLoss ? Method::HighSnr : cfg.methods.front();
  const PrecoderSet pre = build_precoders(method, prob, powers, cfg, cfg.mc);
  const NoiseSpec noise;

  std::mt19937_64 rng(cfg.mc.seed);
  DetectSummary summary;
  csv << "symbol,bit,sent,llr_map,llr_whitened\n";
  const BitMapping map = BitMapping::natural(prob.tables[j]);
  for (int s = 0; s < cfg.symbols; ++s) {
    CVector y = noise_draw(cfg.mc.seed, ch.users() + j, static_cast<std::uint64_t>(s), ch.n_r(j), noise.sigma2);
    std::size_t sent = 0;
    for (std::size_t i = 0; i < ch.users(); ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, prob.tables[i].size() - 1);
      const std::size_t p = pick(rng);
      if (i == j) sent = p;
      y += ch(j, i) * pre.G[i] * prob.tables[i][p];
    }
    const auto llr = map_llr(y, ch, pre, prob.tables, noise, j);
    const auto base = whitened_llr(y, ch, pre, prob.tables, noise, j);
    for (int b = 0; b < map.bits; ++b) {
      const int bit_sign = map.sign(sent, b);
      ++summary.bits;
      summary.map_errors += (llr[b] >= 0.0 ? 1 : -1) != bit_sign;
      summary.whitened_errors += (base[b] >= 0.0 ? 1 : -1) != bit_sign;
      csv << s << ',' << b << ',' << bit_sign << ',' << format_fixed(llr[b], 6) << ',' << format_fixed(base[b], 6)
          << '\n';
    }
  }
  return summary;
}

}  // namespace faic
