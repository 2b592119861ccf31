#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include <momprob/momprob.hpp>

namespace {

using namespace momprob;

// Exit codes: 0 realizable / verification passed, 1 certificate produced or
// verification failed, 2 usage or format error, 3 resource cap exceeded.
// Anything else signals an internal error.
constexpr int kOk = 0;
constexpr int kCertificate = 1;
constexpr int kUsage = 2;
constexpr int kCap = 3;
constexpr int kInternal = 4;

json load_input(const std::string& file) {
  if (file == "-") return load_json(std::cin, "stdin");
  return load_json_file(file);
}

void write_output(const json& j, const std::string& out_file) {
  if (out_file.empty() || out_file == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_file);
  if (!out) throw FormatError(out_file, "cannot open file for writing");
  out << j.dump(2) << "\n";
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

// One rational applies to every site; a comma-separated list gives one per
// site.
RatVec rat_list(const std::string& text, std::size_t sites, const std::string& what) {
  std::vector<std::string> parts = split_csv(text);
  RatVec out;
  try {
    for (const auto& p : parts) out.push_back(parse_rat(p));
  } catch (const std::exception& e) {
    throw FormatError(what, e.what());
  }
  if (out.size() == 1) out.assign(sites, out[0]);
  if (out.size() != sites)
    throw FormatError(what, "expected 1 or " + std::to_string(sites) + " comma-separated values");
  return out;
}

std::size_t resolve_enum_cap(std::size_t flag_value) {
  if (flag_value != 0) return flag_value;
  if (const char* env = std::getenv("MOMPROB_ENUMERATION_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw FormatError("MOMPROB_ENUMERATION_CAP", "expected a positive integer");
  }
  return kDefaultEnumerationCap;
}

std::string config_line(const SiteSpace& space, const Configuration& eta) {
  std::string out = "(";
  for (std::size_t x = 0; x < eta.counts.size(); ++x) {
    if (x) out += ", ";
    out += space.labels()[x] + ":" + std::to_string(eta.counts[x]);
  }
  return out + ")";
}

void print_verdict_table(std::ostream& os, const SiteSpace& space, const Verdict& verdict) {
  if (const auto* rep = std::get_if<RepresentingMeasure>(&verdict)) {
    os << "verdict: measure\n";
    for (const auto& [config, weight] : rep->measure.atoms())
      os << "  " << config_line(space, config) << "  weight " << format_rat(weight) << "\n";
    if (rep->realized_r) os << "realized_R: " << format_rat(*rep->realized_r) << "\n";
    return;
  }
  const auto& cert = std::get<PositivityCertificate>(verdict);
  os << "verdict: certificate\n";
  os << "  f0: " << format_rat(cert.f0) << "\n  f1:";
  for (const Rat& v : cert.f1) os << " " << format_rat(v);
  os << "\n  f2:\n";
  for (const auto& row : cert.f2) {
    os << "   ";
    for (const Rat& v : row) os << " " << format_rat(v);
    os << "\n";
  }
  if (cert.f3) os << "  f3: " << format_rat(*cert.f3) << "\n";
  if (cert.gamma) {
    os << "  gamma:";
    for (const Rat& v : *cert.gamma) os << " " << format_rat(v);
    os << "\n";
  }
}

void print_report_table(std::ostream& os, const VerificationReport& report) {
  for (const auto& check : report.checks) {
    os << "check " << check.name << ": " << (check.pass ? "pass" : "FAIL");
    if (!check.detail.empty()) os << " (" << check.detail << ")";
    os << "\n";
  }
  os << (report.all_pass ? "verification passed" : "verification failed") << "\n";
}

json report_to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& check : report.checks) {
    json c;
    c["name"] = check.name;
    c["pass"] = check.pass;
    if (!check.detail.empty()) c["detail"] = check.detail;
    checks.push_back(std::move(c));
  }
  return {{"checks", std::move(checks)}, {"all_pass", report.all_pass}};
}

// Shared instance-loading options: correlation-function input is converted
// to power moments on ingestion, and ell0 can be overridden from the
// command line.
struct InstanceOptions {
  bool factorial = false;
  std::string ell0_override;
  std::size_t enum_cap_flag = 0;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--factorial", factorial,
                  "treat the moment entries of L as correlation functions");
    cmd->add_option("--ell0", ell0_override, "override ell0 (rational)");
    cmd->add_option("--enum-cap", enum_cap_flag,
                    "enumeration cap (overrides MOMPROB_ENUMERATION_CAP)");
  }

  RealizabilityInstance load(const std::string& file) const {
    RealizabilityInstance inst = instance_from_json(load_input(file));
    if (factorial)
      inst.L = MomentFunctional(factorial_to_power(inst.L.moments()));
    if (!ell0_override.empty()) {
      Rat ell0;
      try {
        ell0 = parse_rat(ell0_override);
      } catch (const std::exception& e) {
        throw FormatError("--ell0", e.what());
      }
      auto moments = inst.L.moments();
      moments[0] = MomentTensor::scalar(inst.space.size(), std::move(ell0));
      inst.L = MomentFunctional(std::move(moments));
    }
    inst.enumeration_cap = resolve_enum_cap(enum_cap_flag);
    return inst;
  }
};

int classify_exception(const std::exception& e, const std::string& file) {
  if (dynamic_cast<const CapExceeded*>(&e) || dynamic_cast<const PivotLimitError*>(&e)) {
    std::cerr << "error: " << file << ": " << e.what() << "\n";
    return kCap;
  }
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e)) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::cerr << "internal error: " << e.what() << "\n";
  return kInternal;
}

struct SolveJob {
  std::string file;
  int code = kInternal;
  json result;
  std::optional<Verdict> verdict;
  std::optional<SiteSpace> space;
  std::string table_extra;
  std::string stderr_text;
};

// Decide one instance file: realize (mode 0), extend-cubic (mode 1) or
// minimal third moment (mode 2).
void run_solve_job(SolveJob& job, const InstanceOptions& opts, int mode, bool verify,
                   const std::string& format) {
  try {
    RealizabilityInstance inst = opts.load(job.file);
    job.space = inst.space;
    bool feasible = true;
    if (mode == 2) {
      if (!inst.gamma) throw FormatError(job.file, "minimization needs gamma in the instance");
      CubicOutcome outcome = minimal_third_moment(inst);
      if (auto* minimum = std::get_if<CubicMinimum>(&outcome)) {
        job.verdict = RepresentingMeasure{minimum->minimizer, minimum->r_star};
        job.result = verdict_to_json(*job.verdict, inst.kspec, inst.enumeration_cap);
        job.result["R_star"] = rat_to_json(minimum->r_star);
        job.table_extra = "R_star: " + format_rat(minimum->r_star) + "\n";
      } else {
        feasible = false;
        job.verdict = std::get<PositivityCertificate>(std::move(outcome));
        job.result = verdict_to_json(*job.verdict, inst.kspec, inst.enumeration_cap);
      }
    } else {
      if (mode == 1 && (!inst.gamma || !inst.r_max))
        throw FormatError(job.file, "the cubic extension needs gamma and r_max in the instance");
      job.verdict = mode == 1 ? extend_with_cubic(inst) : find_representing_measure(inst);
      feasible = std::holds_alternative<RepresentingMeasure>(*job.verdict);
      job.result = verdict_to_json(*job.verdict, inst.kspec, inst.enumeration_cap);
    }

    bool verified = true;
    if (verify) {
      VerificationReport report = verify_verdict(inst, *job.verdict);
      verified = report.all_pass;
      job.result["verification"] = report_to_json(report);
      if (format == "table") {
        std::ostringstream rp;
        print_report_table(rp, report);
        job.stderr_text = rp.str();
      }
    }
    job.code = feasible && verified ? kOk : kCertificate;
  } catch (const std::exception& e) {
    std::ostringstream err;
    if (dynamic_cast<const CapExceeded*>(&e) || dynamic_cast<const PivotLimitError*>(&e)) {
      err << "error: " << job.file << ": " << e.what() << "\n";
      job.code = kCap;
    } else if (dynamic_cast<const FormatError*>(&e) ||
               dynamic_cast<const std::invalid_argument*>(&e)) {
      err << "error: " << e.what() << "\n";
      job.code = kUsage;
    } else {
      err << "internal error: " << e.what() << "\n";
      job.code = kInternal;
    }
    job.stderr_text += err.str();
  }
}

int run_solve_batch(const std::vector<std::string>& files, const InstanceOptions& opts, int mode,
                    bool verify, const std::string& format, unsigned jobs,
                    const std::string& out_file) {
  std::vector<SolveJob> batch(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) batch[i].file = files[i];
  const bool multi = files.size() > 1;

  if (jobs <= 1 || !multi) {
    for (auto& job : batch) run_solve_job(job, opts, mode, verify, format);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= batch.size()) return;
        run_solve_job(batch[i], opts, mode, verify, format);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<unsigned>(jobs, static_cast<unsigned>(batch.size())); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int code = kOk;
  for (auto& job : batch) {
    std::cerr << job.stderr_text;
    code = std::max(code, job.code);
    if (job.code > kCertificate) continue;
    if (multi) {
      job.result["file"] = job.file;
      std::cout << job.result.dump() << "\n";
    } else if (!out_file.empty()) {
      write_output(job.result, out_file);
    } else if (format == "json") {
      std::cout << job.result.dump(2) << "\n";
    } else {
      print_verdict_table(std::cout, *job.space, *job.verdict);
      std::cout << job.table_extra;
    }
  }
  return code;
}

// Tensor family (orders 0..2, optional 3) under keys <prefix>0..<prefix>3.
std::vector<MomentTensor> tensors_from_doc(const json& j, const std::string& prefix,
                                           std::size_t sites) {
  const std::string base0 = prefix + "0", base1 = prefix + "1", base2 = prefix + "2",
                    base3 = prefix + "3";
  std::vector<MomentTensor> out;
  out.push_back(MomentTensor::scalar(
      sites, rat_from_json(require_field(j, base0.c_str(), "$"), "$." + base0)));
  out.push_back(MomentTensor::from_entries(
      1, sites, ratvec_from_json(require_field(j, base1.c_str(), "$"), "$." + base1, sites)));
  RatMat m2 = ratmat_from_json(require_field(j, base2.c_str(), "$"), "$." + base2, sites);
  RatVec flat2;
  for (auto& row : m2)
    for (auto& v : row) flat2.push_back(std::move(v));
  try {
    out.push_back(MomentTensor::from_entries(2, sites, std::move(flat2)));
    if (const json* t3 = optional_field(j, base3.c_str(), "$"))
      out.push_back(
          MomentTensor::from_entries(3, sites, cube_from_json(*t3, "$." + base3, sites)));
  } catch (const std::exception& e) {
    throw FormatError("$." + base2, e.what());
  }
  return out;
}

json tensors_to_doc(const std::vector<MomentTensor>& tensors, const std::string& prefix) {
  json out;
  for (std::size_t k = 0; k < tensors.size(); ++k)
    out[prefix + std::to_string(k)] = tensor_to_json(tensors[k]);
  return out;
}

void print_tensors_table(std::ostream& os, const std::vector<MomentTensor>& tensors,
                         const std::string& prefix) {
  for (std::size_t k = 0; k < tensors.size(); ++k)
    os << prefix << k << ": " << tensor_to_json(tensors[k]).dump() << "\n";
}

int cmd_enumerate(const std::string& file, bool count_only, const std::string& format,
                  std::size_t enum_cap_flag) {
  const json doc = load_input(file);
  SiteSpace space = sites_from_json(doc, "$");
  KSpec kspec = kspec_from_json(require_field(doc, "kspec", "$"), "$.kspec");
  kspec.validate(space);
  const std::size_t cap = resolve_enum_cap(enum_cap_flag);
  if (count_only && kspec.kind != KSpec::Kind::kHardCore) {
    const std::size_t count = count_configurations(space, kspec, cap);
    if (format == "json")
      std::cout << json{{"count", count}}.dump() << "\n";
    else
      std::cout << count << "\n";
    return kOk;
  }
  const auto configs = enumerate_configurations(space, kspec, cap);
  if (count_only) {
    if (format == "json")
      std::cout << json{{"count", configs.size()}}.dump() << "\n";
    else
      std::cout << configs.size() << "\n";
    return kOk;
  }
  if (format == "json") {
    json out;
    json list = json::array();
    for (const auto& eta : configs) list.push_back(eta.counts);
    out["configurations"] = std::move(list);
    out["count"] = configs.size();
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& eta : configs) std::cout << config_line(space, eta) << "\n";
    std::cout << "count: " << configs.size() << "\n";
  }
  return kOk;
}

int cmd_moments(const std::string& file, int max_order, const std::string& format,
                const std::string& out_file) {
  const MeasureFile mf = measure_from_json(load_input(file));
  const auto power = power_moments(mf.measure, max_order);
  const auto factorial = correlation_functions(mf.measure, max_order);
  json out = sites_to_json(mf.space);
  out["power"] = tensors_to_doc(power, "ell");
  out["factorial"] = tensors_to_doc(factorial, "rho");
  if (format == "table" && out_file.empty()) {
    print_tensors_table(std::cout, power, "ell");
    print_tensors_table(std::cout, factorial, "rho");
  } else {
    write_output(out, out_file);
  }
  return kOk;
}

int cmd_convert(const std::string& file, const std::string& to, const std::string& format,
                const std::string& out_file) {
  const json doc = load_input(file);
  SiteSpace space = sites_from_json(doc, "$");
  json out = sites_to_json(space);
  // Tensor keys sit at the top level, or nested under the family name as
  // `moments` emits them ("power" holds ell*, "factorial" holds rho*).
  const auto source = [&doc](const char* first_key, const char* family) -> const json& {
    if (!doc.contains(first_key) && doc.contains(family)) return doc.at(family);
    return doc;
  };
  std::vector<MomentTensor> result;
  std::string prefix;
  if (to == "factorial") {
    result = power_to_factorial(tensors_from_doc(source("ell0", "power"), "ell", space.size()));
    prefix = "rho";
  } else if (to == "power") {
    result = factorial_to_power(tensors_from_doc(source("rho0", "factorial"), "rho", space.size()));
    prefix = "ell";
  } else {
    throw FormatError("--to", "expected power or factorial");
  }
  const json tensors = tensors_to_doc(result, prefix);
  for (const auto& [key, value] : tensors.items()) out[key] = value;
  if (format == "table" && out_file.empty())
    print_tensors_table(std::cout, result, prefix);
  else
    write_output(out, out_file);
  return kOk;
}

int cmd_certify_check(const std::string& instance_file, const std::string& result_file,
                      const InstanceOptions& opts, const std::string& format) {
  RealizabilityInstance inst = opts.load(instance_file);
  Verdict verdict = verdict_from_json(load_input(result_file), "$", inst.space.size());
  VerificationReport report = verify_verdict(inst, verdict);
  if (format == "json")
    std::cout << report_to_json(report).dump(2) << "\n";
  else
    print_report_table(std::cout, report);
  return report.all_pass ? kOk : kCertificate;
}

int cmd_generate(const std::string& kind, const std::string& sites_csv,
                 const std::string& space_file, const std::string& prob_csv,
                 const std::string& lambda_csv, int poisson_cap, const std::string& activity,
                 const std::string& d_text, int q, std::uint64_t seed,
                 const std::string& kspec_name, const std::string& emit,
                 const std::string& gamma_csv, const std::string& r_max_text,
                 std::size_t enum_cap_flag, const std::string& out_file) {
  std::optional<SiteSpace> space;
  if (!space_file.empty()) {
    space = sites_from_json(load_input(space_file), "$");
  } else if (!sites_csv.empty()) {
    space = SiteSpace(split_csv(sites_csv));
  } else {
    throw FormatError("--sites", "generate needs --sites labels or --space file");
  }
  const std::size_t n = space->size();
  const std::size_t cap = resolve_enum_cap(enum_cap_flag);

  auto parse_one = [](const std::string& text, const std::string& what) {
    try {
      return parse_rat(text);
    } catch (const std::exception& e) {
      throw FormatError(what, e.what());
    }
  };

  FiniteMeasure mu(1, {});
  KSpec kspec = KSpec::at_most(0);
  json meta{{"generator", kind}};
  if (kind == "bernoulli") {
    if (prob_csv.empty()) throw FormatError("--prob", "bernoulli needs occupation probabilities");
    mu = bernoulli_field(*space, rat_list(prob_csv, n, "--prob"), cap);
    kspec = KSpec::simple(static_cast<int>(n));
  } else if (kind == "poisson") {
    if (lambda_csv.empty()) throw FormatError("--lambda", "poisson needs intensities");
    if (poisson_cap < 0) throw FormatError("--cap", "poisson needs a per-site cap >= 0");
    mu = truncated_poisson(*space, rat_list(lambda_csv, n, "--lambda"), poisson_cap, cap);
    kspec = KSpec::at_most(poisson_cap * static_cast<int>(n));
    meta["cap"] = poisson_cap;
  } else if (kind == "gibbs") {
    if (activity.empty() || d_text.empty() || q < 0)
      throw FormatError("--activity", "gibbs needs --activity, --d and --q");
    const Rat z = parse_one(activity, "--activity");
    const Rat d = parse_one(d_text, "--d");
    mu = gibbs_hardcore(*space, z, d, q, cap);
    kspec = KSpec::hard_core(d, q);
  } else if (kind == "random") {
    if (q < 0) throw FormatError("--q", "random needs --q");
    if (kspec_name == "at_most_q" || kspec_name.empty())
      kspec = KSpec::at_most(q);
    else if (kspec_name == "exactly_q")
      kspec = KSpec::exactly(q);
    else if (kspec_name == "simple")
      kspec = KSpec::simple(q);
    else if (kspec_name == "hard_core")
      kspec = KSpec::hard_core(parse_one(d_text, "--d"), q);
    else
      throw FormatError("--kspec", "expected at_most_q, exactly_q, simple or hard_core");
    kspec.validate(*space);
    mu = random_measure(*space, kspec, seed, cap);
    meta["seed"] = seed;
  } else {
    throw FormatError("kind", "expected bernoulli, poisson, gibbs or random");
  }

  if (emit == "measure") {
    write_output(measure_to_json(*space, mu), out_file);
    return kOk;
  }
  if (emit != "instance") throw FormatError("--emit", "expected measure or instance");
  std::optional<RatVec> gamma;
  if (!gamma_csv.empty()) gamma = rat_list(gamma_csv, n, "--gamma");
  RealizabilityInstance inst = instance_from_measure(mu, *space, kspec, std::move(gamma));
  if (!r_max_text.empty()) inst.r_max = parse_one(r_max_text, "--r-max");
  inst.validate();
  json out = instance_to_json(inst);
  out["meta"] = std::move(meta);
  write_output(out, out_file);
  return kOk;
}

int cmd_ratio_bound(const std::string& file, int scan_q, const std::string& format,
                    std::size_t enum_cap_flag) {
  const json doc = load_input(file);
  SiteSpace space = sites_from_json(doc, "$");
  const std::size_t n = space.size();
  const Rat f0 = rat_from_json(require_field(doc, "f0", "$"), "$.f0");
  std::optional<RatVec> f1;
  if (const json* j1 = optional_field(doc, "f1", "$")) f1 = ratvec_from_json(*j1, "$.f1", n);
  std::optional<RatMat> f2;
  if (const json* j2 = optional_field(doc, "f2", "$")) {
    if (!f1) f1 = RatVec(n, Rat(0));
    f2 = ratmat_from_json(*j2, "$.f2", n);
  }
  RatVec gamma = ratvec_from_json(require_field(doc, "gamma", "$"), "$.gamma", n);

  Polynomial b = Polynomial::from_coefficients(n, f0, f1, f2);
  const Rat lambda = ratio_bound(b, gamma);

  // Exact empirical maximum of |b(eta)| / (1 + (gamma-mass)^3) over the
  // configurations with total mass <= scan_q.
  Rat best(0);
  Configuration arg;
  for (const auto& eta :
       enumerate_configurations(space, KSpec::at_most(scan_q), resolve_enum_cap(enum_cap_flag))) {
    const Rat mass = weighted_mass(gamma, eta);
    const Rat ratio = rat_abs(evaluate(b, eta)) / (1 + mass * mass * mass);
    if (ratio > best) {
      best = ratio;
      arg = eta;
    }
  }
  if (format == "json") {
    json out;
    out["lambda_b"] = rat_to_json(lambda);
    out["empirical_max"] = rat_to_json(best);
    out["scan_Q"] = scan_q;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "lambda_b: " << format_rat(lambda) << "\n"
              << "empirical max (Q <= " << scan_q << "): " << format_rat(best) << " at "
              << config_line(space, arg) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact realizability of truncated moment data on finite configuration spaces"};
  app.require_subcommand(1);
  argv = app.ensure_utf8(argv);

  std::string format = "table";
  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "list admissible configurations");
  std::string enum_file;
  bool count_only = false;
  std::size_t enum_cap_flag = 0;
  enumerate->add_option("input", enum_file, "JSON file with sites and kspec ('-' for stdin)")
      ->required();
  enumerate->add_flag("--count", count_only, "print only the number of configurations");
  enumerate->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  enumerate->add_option("--enum-cap", enum_cap_flag, "enumeration cap override");

  // moments
  auto* moments = app.add_subcommand("moments", "power and factorial moments of a measure");
  std::string moments_file, moments_out;
  int max_order = 3;
  moments->add_option("input", moments_file, "measure JSON file ('-' for stdin)")->required();
  moments->add_option("--max-order", max_order)->check(CLI::Range(0, 3));
  moments->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  moments->add_option("--out", moments_out, "write the JSON document to a file");

  // convert
  auto* convert = app.add_subcommand("convert", "convert power <-> factorial moment tensors");
  std::string convert_file, convert_to, convert_out;
  convert->add_option("input", convert_file, "moment document ('-' for stdin)")->required();
  convert->add_option("--to", convert_to, "target family")
      ->required()
      ->check(CLI::IsMember({"power", "factorial"}));
  convert->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  convert->add_option("--out", convert_out, "write the JSON document to a file");

  // realize / extend-cubic
  InstanceOptions inst_opts;
  std::vector<std::string> instance_files;
  bool verify = false, minimize = false;
  unsigned jobs = 1;
  std::string result_out;

  auto* realize = app.add_subcommand("realize", "find a representing measure or a certificate");
  realize->add_option("input", instance_files, "instance JSON files ('-' for stdin)")->required();
  realize->add_flag("--verify", verify, "re-verify the verdict before reporting");
  realize->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  realize->add_option("--jobs", jobs, "parallel workers for batch inputs");
  realize->add_option("--out", result_out, "write the result JSON to a file (single input)");
  inst_opts.attach(realize);

  auto* extend = app.add_subcommand("extend-cubic", "realizability under a cubic mass bound");
  extend->add_option("input", instance_files, "instance JSON files ('-' for stdin)")->required();
  extend->add_flag("--minimize", minimize, "report the minimal cubic mass moment R*");
  extend->add_flag("--verify", verify, "re-verify the verdict before reporting");
  extend->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  extend->add_option("--jobs", jobs, "parallel workers for batch inputs");
  extend->add_option("--out", result_out, "write the result JSON to a file (single input)");
  inst_opts.attach(extend);

  // certify-check
  auto* certify = app.add_subcommand("certify-check", "re-verify a stored verdict");
  std::string certify_instance, certify_result;
  certify->add_option("instance", certify_instance, "instance JSON file")->required();
  certify->add_option("result", certify_result, "result JSON file produced by realize/extend-cubic")
      ->required();
  certify->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  inst_opts.attach(certify);

  // generate
  auto* generate = app.add_subcommand("generate", "emit generator measures and instances");
  std::string gen_kind, gen_sites, gen_space, gen_prob, gen_lambda, gen_activity, gen_d;
  std::string gen_kspec, gen_emit = "measure", gen_gamma, gen_rmax, gen_out;
  int gen_cap = -1, gen_q = -1;
  std::uint64_t gen_seed = 1;
  generate->add_option("kind", gen_kind, "bernoulli | poisson | gibbs | random")->required();
  generate->add_option("--sites", gen_sites, "comma-separated site labels");
  generate->add_option("--space", gen_space, "JSON file with sites and distances");
  generate->add_option("--prob", gen_prob, "occupation probabilities (one or per-site list)");
  generate->add_option("--lambda", gen_lambda, "Poisson intensities (one or per-site list)");
  generate->add_option("--cap", gen_cap, "per-site Poisson truncation");
  generate->add_option("--activity", gen_activity, "Gibbs activity z");
  generate->add_option("--d", gen_d, "hard-core distance D");
  generate->add_option("--q", gen_q, "total-mass bound Q");
  generate->add_option("--seed", gen_seed, "seed for the random generator");
  generate->add_option("--kspec", gen_kspec, "constraint for random: at_most_q | exactly_q | simple | hard_core");
  generate->add_option("--emit", gen_emit)->check(CLI::IsMember({"measure", "instance"}));
  generate->add_option("--gamma", gen_gamma, "gamma weights for emitted instances");
  generate->add_option("--r-max", gen_rmax, "cubic mass bound for emitted instances");
  generate->add_option("--enum-cap", enum_cap_flag, "enumeration cap override");
  generate->add_option("--out", gen_out, "output file (default stdout)");

  // ratio-bound
  auto* ratio = app.add_subcommand("ratio-bound", "closed-form bound lambda_b and empirical max");
  std::string ratio_file;
  int scan_q = 6;
  ratio->add_option("input", ratio_file, "polynomial document with gamma ('-' for stdin)")
      ->required();
  ratio->add_option("--q", scan_q, "scan configurations of total mass <= Q")->check(CLI::Range(0, 64));
  ratio->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  ratio->add_option("--enum-cap", enum_cap_flag, "enumeration cap override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (enumerate->parsed()) return cmd_enumerate(enum_file, count_only, format, enum_cap_flag);
    if (moments->parsed()) return cmd_moments(moments_file, max_order, format, moments_out);
    if (convert->parsed()) return cmd_convert(convert_file, convert_to, format, convert_out);
    if (realize->parsed())
      return run_solve_batch(instance_files, inst_opts, 0, verify, format, jobs, result_out);
    if (extend->parsed())
      return run_solve_batch(instance_files, inst_opts, minimize ? 2 : 1, verify, format, jobs,
                             result_out);
    if (certify->parsed()) return cmd_certify_check(certify_instance, certify_result, inst_opts, format);
    if (generate->parsed())
      return cmd_generate(gen_kind, gen_sites, gen_space, gen_prob, gen_lambda, gen_cap,
                          gen_activity, gen_d, gen_q, gen_seed, gen_kspec, gen_emit, gen_gamma,
                          gen_rmax, enum_cap_flag, gen_out);
    if (ratio->parsed()) return cmd_ratio_bound(ratio_file, scan_q, format, enum_cap_flag);
  } catch (const std::exception& e) {
    return classify_exception(e, "input");
  }
  return kUsage;
}
