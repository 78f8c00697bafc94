// ============================================================================
// tools/qbmc.cpp — command-line front-end
// ============================================================================
//
// Subcommands:
//   generate   write a benchmark model (example | fischer | lynch-shavit)
//   check      compose, encode, solve, decode and re-validate a model
//   emit       write the SMT-LIB2 encoding without solving
//   oracle     exact brute-force bounded reachability for small instances
//   validate   structural model validation (optionally re-check a trace dump)
//   bench      run a matrix of (model, encoding, k) cells, resumable
//   solve      built-in SMT solver over SMT-LIB2 text (stdin or file)
//
// check exit codes: 0 UNSAT, 1 SAT, 2 UNKNOWN/TIMEOUT, 3 usage or parse
// error, 4 internal invariant failure (SAT with an invalid trace).
//
// ============================================================================

#include "qbmc/backend.hpp"
#include "qbmc/encoder.hpp"
#include "qbmc/generators.hpp"
#include "qbmc/model.hpp"
#include "qbmc/oracle.hpp"
#include "qbmc/smtlib.hpp"
#include "qbmc/trace.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using nlohmann::json;

namespace {

constexpr int kExitUnsat = 0;
constexpr int kExitSat = 1;
constexpr int kExitNoAnswer = 2;
constexpr int kExitUsage = 3;
constexpr int kExitInternal = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << data;
}

qbmc::Rational parse_rat(const std::string& s) { return qbmc::Rational::from_string(s); }

struct EncodeFlags {
    std::string encoding = "qf";  // qf | quantified
    std::string delta_mode = "per-step";
    std::string selector = "binary";
    bool no_logic = false;

    qbmc::EncodingOptions options() const {
        qbmc::EncodingOptions o;
        o.delta_mode = delta_mode == "shared" ? qbmc::DeltaMode::Shared : qbmc::DeltaMode::PerStep;
        o.selector_mode = selector == "cubes" ? qbmc::SelectorMode::MergedCubes
                                              : qbmc::SelectorMode::BinaryEquality;
        return o;
    }
};

void add_encoding_flags(CLI::App* cmd, EncodeFlags& flags) {
    cmd->add_option("--encoding", flags.encoding, "encoding: qf | quantified")
        ->check(CLI::IsMember({"qf", "quantified"}));
    cmd->add_option("--delta-mode", flags.delta_mode, "dwell handling: per-step | shared")
        ->check(CLI::IsMember({"per-step", "shared"}));
    cmd->add_option("--selector", flags.selector, "selector form: binary | cubes")
        ->check(CLI::IsMember({"binary", "cubes"}));
    cmd->add_flag("--no-logic", flags.no_logic, "omit the set-logic line");
}

qbmc::Script encode_unit(const qbmc::HybridAutomaton& ha, const EncodeFlags& flags,
                         std::size_t k) {
    qbmc::Script s;
    if (flags.encoding == "quantified") {
        if (k == 0) throw qbmc::EncodingError("the quantified encoding needs k >= 1");
        s = qbmc::encode_qbmc(ha, k, flags.options());
    } else {
        s = qbmc::encode_qf_bmc(ha, k, flags.options());
    }
    if (flags.no_logic) s.emit_logic = false;
    return s;
}

json state_json(const qbmc::State& s) {
    json vals = json::object();
    for (const auto& [name, v] : s.valuation) vals[name] = v.to_string();
    return json{{"location", s.location}, {"valuation", vals}};
}

json trace_json(const qbmc::Trace& t) {
    json steps = json::array();
    for (const auto& s : t.steps) {
        json step;
        switch (s.kind) {
            case qbmc::TraceStep::Discrete:
                step["kind"] = "discrete";
                step["transition"] = s.transition_index;
                break;
            case qbmc::TraceStep::Trajectory:
                step["kind"] = "trajectory";
                step["dwell"] = s.dwell.to_string();
                break;
            case qbmc::TraceStep::Stutter:
                step["kind"] = "stutter";
                step["dwell"] = "0";
                break;
        }
        step["pre"] = state_json(s.pre);
        step["post"] = state_json(s.post);
        steps.push_back(std::move(step));
    }
    return json{{"encoding", t.encoding},
                {"k", t.k},
                {"initial", state_json(t.initial)},
                {"steps", std::move(steps)}};
}

qbmc::State state_from_json(const json& j) {
    qbmc::State s;
    s.location = j.at("location").get<std::string>();
    for (auto it = j.at("valuation").begin(); it != j.at("valuation").end(); ++it)
        s.valuation[it.key()] = parse_rat(it.value().get<std::string>());
    return s;
}

qbmc::Trace trace_from_json(const json& j) {
    qbmc::Trace t;
    t.encoding = j.value("encoding", "");
    t.k = j.value("k", 0u);
    t.initial = state_from_json(j.at("initial"));
    for (const auto& js : j.at("steps")) {
        qbmc::TraceStep step;
        std::string kind = js.at("kind").get<std::string>();
        if (kind == "discrete") {
            step.kind = qbmc::TraceStep::Discrete;
            step.transition_index = js.at("transition").get<std::size_t>();
        } else {
            step.kind = kind == "stutter" ? qbmc::TraceStep::Stutter : qbmc::TraceStep::Trajectory;
            step.dwell = parse_rat(js.value("dwell", "0"));
        }
        step.pre = state_from_json(js.at("pre"));
        step.post = state_from_json(js.at("post"));
        t.steps.push_back(std::move(step));
    }
    return t;
}

// ── check ───────────────────────────────────────────────────────────────────

struct CheckOutcome {
    qbmc::Status status = qbmc::Status::Unknown;
    std::size_t k = 0;
    double wall_seconds = 0;
    std::optional<std::uint64_t> peak_memory;
    std::optional<qbmc::Trace> trace;
    bool trace_valid = false;
    qbmc::FormulaStats stats;
};

CheckOutcome run_one_check(const qbmc::HybridAutomaton& ha, const EncodeFlags& flags,
                           std::size_t k, const qbmc::SolverConfig& solver) {
    CheckOutcome out;
    out.k = k;
    qbmc::Script script = encode_unit(ha, flags, k);
    out.stats = qbmc::formula_stats(script);
    qbmc::SolverVerdict v = qbmc::run_check(script, solver);
    out.status = v.status;
    out.wall_seconds = v.wall_time_seconds;
    out.peak_memory = v.peak_memory_bytes;
    if (v.status == qbmc::Status::Sat && v.model) {
        out.trace = qbmc::decode_trace(*v.model, ha, k,
                                       flags.encoding == "quantified" ? "quantified" : "qf");
        auto validation = qbmc::validate_trace(ha, *out.trace);
        out.trace_valid = validation.ok() && qbmc::trace_hits_bad(ha, *out.trace);
    }
    return out;
}

int cmd_check(const std::string& model_path, const EncodeFlags& flags, std::size_t kmax,
              bool deepen, const qbmc::SolverConfig& solver, bool as_json,
              const std::string& trace_out) {
    qbmc::ModelDocument doc = qbmc::parse_model(read_file(model_path));
    qbmc::CheckUnit unit = qbmc::build_check_unit(doc);

    std::vector<std::size_t> schedule;
    if (deepen)
        for (std::size_t k = 1; k <= kmax; ++k) schedule.push_back(k);
    else
        schedule.push_back(kmax);

    CheckOutcome last;
    for (std::size_t k : schedule) {
        last = run_one_check(unit.automaton, flags, k, solver);
        if (last.status == qbmc::Status::Sat || last.status == qbmc::Status::Error ||
            last.status == qbmc::Status::Timeout)
            break;
    }

    if (as_json) {
        json j{{"verdict", qbmc::status_text(last.status)},
               {"k", last.k},
               {"encoding", flags.encoding},
               {"time_seconds", last.wall_seconds},
               {"template_instantiations", last.stats.template_instantiations},
               {"nodes", last.stats.nodes}};
        if (last.peak_memory) j["peak_memory_bytes"] = *last.peak_memory;
        if (last.trace) {
            j["trace"] = trace_json(*last.trace);
            j["trace_valid"] = last.trace_valid;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << qbmc::status_text(last.status) << " k=" << last.k << " encoding="
                  << flags.encoding << " time=" << last.wall_seconds << "s" << "\n";
        if (last.trace) {
            std::cout << (last.trace_valid ? "counterexample (validated):"
                                           : "counterexample INVALID:")
                      << "\n"
                      << qbmc::format_trace(*last.trace);
        }
    }
    if (!trace_out.empty() && last.trace) write_file(trace_out, trace_json(*last.trace).dump(2));

    switch (last.status) {
        case qbmc::Status::Unsat: return kExitUnsat;
        case qbmc::Status::Sat: return last.trace_valid ? kExitSat : kExitInternal;
        case qbmc::Status::Unknown:
        case qbmc::Status::Timeout: return kExitNoAnswer;
        case qbmc::Status::Error: return kExitInternal;
    }
    return kExitInternal;
}

// ── bench ───────────────────────────────────────────────────────────────────

struct BenchCell {
    std::string id;
    std::string model;
    std::string encoding;
    std::size_t k = 0;
    std::string expected;  // optional verdict
};

struct BenchRow {
    BenchCell cell;
    std::string config_hash;
    std::string verdict = "-";
    double time_seconds = 0;
    std::optional<std::uint64_t> peak_memory;
    std::size_t locations = 0;
    std::size_t templates = 0;
    std::string pass = "-";
    bool from_cache = false;
};

std::string fnv_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

int cmd_bench(const std::string& matrix_path, const EncodeFlags& base_flags,
              const qbmc::SolverConfig& solver, const std::string& report_path, int jobs,
              bool as_json) {
    std::vector<BenchCell> cells;
    {
        std::istringstream in(read_file(matrix_path));
        std::string line;
        while (std::getline(in, line)) {
            auto hash_pos = line.find('#');
            if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
            std::istringstream ls(line);
            BenchCell c;
            if (!(ls >> c.id >> c.model >> c.encoding >> c.k)) continue;
            ls >> c.expected;
            cells.push_back(std::move(c));
        }
    }

    // resume: skip cells already present in the report (same id + config)
    std::map<std::string, BenchRow> cached;
    if (!report_path.empty()) {
        std::ifstream in(report_path);
        std::string line;
        while (in && std::getline(in, line)) {
            std::istringstream ls(line);
            BenchRow r;
            std::string mem;
            if (!(ls >> r.cell.id >> r.config_hash >> r.verdict >> r.time_seconds >> mem >>
                  r.locations >> r.templates >> r.pass))
                continue;
            if (mem != "-") r.peak_memory = std::stoull(mem);
            r.from_cache = true;
            cached[r.cell.id + "/" + r.config_hash] = r;
        }
    }

    std::vector<BenchRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const BenchCell& cell = cells[i];
            EncodeFlags flags = base_flags;
            flags.encoding = cell.encoding;
            BenchRow row;
            row.cell = cell;
            row.config_hash = fnv_hash(cell.model + "|" + cell.encoding + "|" +
                                       std::to_string(cell.k) + "|" + flags.delta_mode + "|" +
                                       flags.selector + "|" + solver.command);
            auto hit = cached.find(cell.id + "/" + row.config_hash);
            if (hit != cached.end()) {
                rows[i] = hit->second;
                rows[i].cell = cell;
                continue;
            }
            try {
                qbmc::ModelDocument doc = qbmc::parse_model(read_file(cell.model));
                qbmc::CheckUnit unit = qbmc::build_check_unit(doc);
                row.locations = unit.automaton.locations.size();
                if (cell.encoding == "oracle") {
                    auto start = std::chrono::steady_clock::now();
                    auto out = qbmc::oracle_check(unit.automaton, cell.k);
                    row.time_seconds = std::chrono::duration<double>(
                                           std::chrono::steady_clock::now() - start)
                                           .count();
                    row.verdict = out.kind == qbmc::OracleOutcome::Sat      ? "SAT"
                                  : out.kind == qbmc::OracleOutcome::Unsat ? "UNSAT"
                                                                           : "ORACLE-REFUSED";
                } else {
                    CheckOutcome out = run_one_check(unit.automaton, flags, cell.k, solver);
                    row.verdict = qbmc::status_text(out.status);
                    if (out.status == qbmc::Status::Sat && !out.trace_valid)
                        row.verdict = "ERROR";
                    row.time_seconds = out.wall_seconds;
                    row.peak_memory = out.peak_memory;
                    row.templates = out.stats.template_instantiations;
                }
            } catch (const std::exception& e) {
                row.verdict = "ERROR";
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << cell.id << ": " << e.what() << "\n";
            }
            if (!cell.expected.empty())
                row.pass = row.verdict == cell.expected ? "PASS" : "FAIL";
            rows[i] = row;
        }
    };

    if (jobs < 1) jobs = 1;
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // report file (append-free rewrite keeps it consistent with this matrix)
    if (!report_path.empty()) {
        std::ostringstream os;
        for (const auto& r : rows) {
            os << r.cell.id << " " << r.config_hash << " " << r.verdict << " " << r.time_seconds
               << " " << (r.peak_memory ? std::to_string(*r.peak_memory) : "-") << " "
               << r.locations << " " << r.templates << " " << r.pass << "\n";
        }
        write_file(report_path, os.str());
    }

    if (as_json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json j{{"id", r.cell.id},          {"model", r.cell.model},
                   {"encoding", r.cell.encoding}, {"k", r.cell.k},
                   {"verdict", r.verdict},     {"time_seconds", r.time_seconds},
                   {"locations", r.locations}, {"template_instantiations", r.templates},
                   {"pass", r.pass},           {"cached", r.from_cache}};
            if (r.peak_memory) j["peak_memory_bytes"] = *r.peak_memory;
            arr.push_back(std::move(j));
        }
        std::cout << arr.dump(2) << "\n";
    } else {
        std::cout << "id\tNoL\tk\tencoding\tverdict\ttime(s)\ttemplates\tmem\tPASS\n";
        for (const auto& r : rows) {
            std::cout << r.cell.id << "\t" << r.locations << "\t" << r.cell.k << "\t"
                      << r.cell.encoding << "\t" << r.verdict << "\t" << r.time_seconds << "\t"
                      << r.templates << "\t"
                      << (r.peak_memory ? std::to_string(*r.peak_memory) : "-") << "\t" << r.pass
                      << (r.from_cache ? " (cached)" : "") << "\n";
        }
    }

    for (const auto& r : rows)
        if (r.pass == "FAIL") return 1;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded model checking for rectangular hybrid automata"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a benchmark model");
    std::string family;
    gen->add_option("family", family, "example | fischer | lynch-shavit")->required();
    std::string out_path;
    gen->add_option("-o,--output", out_path, "output file (default stdout)");
    std::size_t gen_n = 2;
    gen->add_option("-n,--processes", gen_n, "number of processes");
    std::string a1 = "0", b1 = "1", a2 = "0", b2 = "2";
    gen->add_option("--a1", a1);
    gen->add_option("--b1", b1);
    gen->add_option("--a2", a2);
    gen->add_option("--b2", b2);
    std::string delta1 = "5", delta2 = "70";
    gen->add_option("--delta1", delta1, "first timing parameter");
    gen->add_option("--delta2", delta2, "second timing parameter");
    std::optional<long long> gen_kmax;
    gen->add_option("--kmax", gen_kmax, "default bound stored in the model");

    // check
    auto* check = app.add_subcommand("check", "bounded model check");
    std::string model_path;
    check->add_option("model", model_path, "model file")->required();
    EncodeFlags check_flags;
    add_encoding_flags(check, check_flags);
    std::size_t kmax = 0;
    auto* kopt = check->add_option("--kmax", kmax, "bound k");
    bool deepen = false;
    check->add_flag("--deepen", deepen, "iterative deepening k = 1..kmax");
    std::string solver_cmd;
    check->add_option("--solver", solver_cmd, "external solver command (default: builtin)");
    double timeout_s = 0;
    check->add_option("--timeout", timeout_s, "timeout seconds per solver call");
    bool as_json = false;
    check->add_flag("--json", as_json, "machine-readable output");
    std::string trace_out;
    check->add_option("--trace-out", trace_out, "write the counterexample trace as JSON");

    // emit
    auto* emit = app.add_subcommand("emit", "write the SMT-LIB2 encoding");
    std::string emit_model, emit_out;
    emit->add_option("model", emit_model, "model file")->required();
    emit->add_option("-o,--output", emit_out, "output file (default stdout)");
    EncodeFlags emit_flags;
    add_encoding_flags(emit, emit_flags);
    std::size_t emit_k = 0;
    auto* emit_kopt = emit->add_option("--kmax", emit_k, "bound k");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact brute-force check");
    std::string oracle_model;
    oracle->add_option("model", oracle_model, "model file")->required();
    std::size_t oracle_k = 0;
    auto* oracle_kopt = oracle->add_option("--kmax", oracle_k, "bound k");
    std::size_t budget = 1'000'000;
    oracle->add_option("--budget", budget, "path enumeration budget");
    bool oracle_json = false;
    oracle->add_flag("--json", oracle_json, "machine-readable output");

    // validate
    auto* validate = app.add_subcommand("validate", "structural validation");
    std::string val_model, val_trace;
    validate->add_option("model", val_model, "model file")->required();
    validate->add_option("--trace", val_trace, "trace JSON to re-validate");
    bool val_json = false;
    validate->add_flag("--json", val_json, "machine-readable output");

    // bench
    auto* bench = app.add_subcommand("bench", "run a benchmark matrix");
    std::string matrix_path, report_path;
    bench->add_option("matrix", matrix_path, "matrix file: id model encoding k [expected]")
        ->required();
    bench->add_option("--report", report_path, "report file (resume support)");
    EncodeFlags bench_flags;
    bench->add_option("--delta-mode", bench_flags.delta_mode)
        ->check(CLI::IsMember({"per-step", "shared"}));
    bench->add_option("--selector", bench_flags.selector)
        ->check(CLI::IsMember({"binary", "cubes"}));
    int jobs = 1;
    bench->add_option("--jobs", jobs, "parallel cells");
    std::string bench_solver;
    bench->add_option("--solver", bench_solver, "external solver command");
    double bench_timeout = 0;
    bench->add_option("--timeout", bench_timeout, "timeout seconds per cell");
    bool bench_json = false;
    bench->add_flag("--json", bench_json, "machine-readable output");

    // solve
    auto* solve = app.add_subcommand("solve", "built-in SMT solver (SMT-LIB2)");
    std::string solve_path;
    solve->add_option("file", solve_path, "script file (default stdin)");
    double solve_timeout = 0;
    solve->add_option("--timeout", solve_timeout, "timeout seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    auto solver_config = [&](const std::string& flag_cmd, double secs) {
        qbmc::SolverConfig cfg = qbmc::default_solver_config();
        if (!flag_cmd.empty()) cfg.command = flag_cmd;
        cfg.timeout = std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
        return cfg;
    };

    try {
        if (gen->parsed()) {
            qbmc::ModelDocument doc;
            if (family == "example")
                doc = qbmc::gen_example(parse_rat(a1), parse_rat(b1), parse_rat(a2), parse_rat(b2));
            else if (family == "fischer")
                doc = qbmc::gen_fischer(gen_n, parse_rat(delta1), parse_rat(delta2));
            else if (family == "lynch-shavit")
                doc = qbmc::gen_lynch_shavit(gen_n, parse_rat(delta1), parse_rat(delta2));
            else
                throw std::runtime_error("unknown family " + family);
            if (gen_kmax) {
                if (!doc.check) doc.check.emplace();
                doc.check->default_kmax = *gen_kmax;
            }
            std::string text = qbmc::serialize_model(doc);
            if (out_path.empty()) std::cout << text;
            else write_file(out_path, text);
            return 0;
        }

        if (check->parsed()) {
            if (kopt->count() == 0) {
                qbmc::ModelDocument doc = qbmc::parse_model(read_file(model_path));
                if (doc.check && doc.check->default_kmax)
                    kmax = static_cast<std::size_t>(*doc.check->default_kmax);
                else
                    throw std::runtime_error("--kmax required (model has no default)");
            }
            return cmd_check(model_path, check_flags, kmax, deepen,
                             solver_config(solver_cmd, timeout_s), as_json, trace_out);
        }

        if (emit->parsed()) {
            qbmc::ModelDocument doc = qbmc::parse_model(read_file(emit_model));
            qbmc::CheckUnit unit = qbmc::build_check_unit(doc);
            std::size_t k = emit_k;
            if (emit_kopt->count() == 0) {
                if (unit.default_kmax) k = static_cast<std::size_t>(*unit.default_kmax);
                else throw std::runtime_error("--kmax required (model has no default)");
            }
            qbmc::Script script = encode_unit(unit.automaton, emit_flags, k);
            std::string text = qbmc::to_smtlib2(script);
            if (emit_out.empty()) std::cout << text;
            else write_file(emit_out, text);
            return 0;
        }

        if (oracle->parsed()) {
            qbmc::ModelDocument doc = qbmc::parse_model(read_file(oracle_model));
            qbmc::CheckUnit unit = qbmc::build_check_unit(doc);
            std::size_t k = oracle_k;
            if (oracle_kopt->count() == 0) {
                if (unit.default_kmax) k = static_cast<std::size_t>(*unit.default_kmax);
                else throw std::runtime_error("--kmax required (model has no default)");
            }
            qbmc::OracleOutcome out = qbmc::oracle_check(unit.automaton, k, budget);
            std::string verdict = out.kind == qbmc::OracleOutcome::Sat      ? "SAT"
                                  : out.kind == qbmc::OracleOutcome::Unsat ? "UNSAT"
                                                                           : "ORACLE-REFUSED";
            if (oracle_json) {
                json j{{"verdict", verdict}, {"paths", out.paths_explored}};
                if (out.witness) j["trace"] = trace_json(*out.witness);
                if (!out.refusal.empty()) j["refusal"] = out.refusal;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << verdict << " k=" << k << " paths=" << out.paths_explored << "\n";
                if (out.witness) std::cout << qbmc::format_trace(*out.witness);
                if (!out.refusal.empty()) std::cout << out.refusal << "\n";
            }
            if (out.kind == qbmc::OracleOutcome::Sat) {
                auto validation = qbmc::validate_trace(unit.automaton, *out.witness);
                if (!validation.ok()) {
                    for (const auto& v : validation.violations) std::cerr << v << "\n";
                    return kExitInternal;
                }
                return kExitSat;
            }
            return out.kind == qbmc::OracleOutcome::Unsat ? kExitUnsat : kExitNoAnswer;
        }

        if (validate->parsed()) {
            qbmc::ModelDocument doc = qbmc::parse_model(read_file(val_model));
            qbmc::CheckUnit unit = qbmc::build_check_unit(doc);  // throws when invalid
            auto report = qbmc::validate_automaton(unit.automaton);
            int rc = 0;
            json j{{"valid", report.ok()}, {"is_rectangular", report.is_rectangular},
                   {"violations", report.violations}};
            if (!val_trace.empty()) {
                qbmc::Trace trace = trace_from_json(json::parse(read_file(val_trace)));
                auto tv = qbmc::validate_trace(unit.automaton, trace);
                j["trace_valid"] = tv.ok();
                j["trace_violations"] = tv.violations;
                if (!tv.ok()) rc = kExitInternal;
            }
            if (val_json) {
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << (report.ok() ? "valid" : "INVALID")
                          << " rectangular=" << (report.is_rectangular ? "yes" : "no") << "\n";
                for (const auto& v : report.violations) std::cout << "  " << v << "\n";
                if (j.contains("trace_valid"))
                    std::cout << "trace " << (j["trace_valid"].get<bool>() ? "valid" : "INVALID")
                              << "\n";
                if (j.contains("trace_violations"))
                    for (const auto& v : j["trace_violations"])
                        std::cout << "  " << v.get<std::string>() << "\n";
            }
            return rc;
        }

        if (bench->parsed()) {
            return cmd_bench(matrix_path, bench_flags, solver_config(bench_solver, bench_timeout),
                             report_path, jobs, bench_json);
        }

        if (solve->parsed()) {
            std::string text;
            if (solve_path.empty()) {
                std::ostringstream ss;
                ss << std::cin.rdbuf();
                text = ss.str();
            } else {
                text = read_file(solve_path);
            }
            qbmc::Script script;
            try {
                script = qbmc::read_smtlib2(text);
            } catch (const qbmc::SmtlibError& e) {
                std::cout << "(error \"" << e.what() << "\")\n";
                return kExitUsage;
            }
            qbmc::smt::SolveLimits limits;
            limits.timeout =
                std::chrono::milliseconds(static_cast<long long>(solve_timeout * 1000.0));
            qbmc::smt::SolveResult r = qbmc::smt::solve_script(script, limits);
            switch (r.status) {
                case qbmc::smt::SolveStatus::Sat: {
                    std::cout << "sat\n";
                    if (script.produce_models) {
                        std::cout << "(\n";
                        for (const auto& [name, sort] : script.symbols) {
                            auto it = r.model.find(name);
                            if (it == r.model.end()) continue;
                            std::cout << "  (define-fun " << name << " () "
                                      << qbmc::sort_text(sort) << " ";
                            const qbmc::Value& v = it->second;
                            if (v.kind == qbmc::Value::VBool) {
                                std::cout << (v.b ? "true" : "false");
                            } else if (v.kind == qbmc::Value::VBv) {
                                std::cout << "(_ bv" << v.bv << " " << v.width << ")";
                            } else {
                                std::ostringstream os;
                                qbmc::detail::render_rational(os, v.rat);
                                std::cout << os.str();
                            }
                            std::cout << ")\n";
                        }
                        std::cout << ")\n";
                    }
                    return 0;
                }
                case qbmc::smt::SolveStatus::Unsat:
                    std::cout << "unsat\n";
                    return 0;
                case qbmc::smt::SolveStatus::Timeout:
                    std::cout << "unknown\n(:reason timeout)\n";
                    return 0;
                case qbmc::smt::SolveStatus::Unknown:
                    std::cout << "unknown\n";
                    if (!r.comment.empty()) std::cout << "(:reason \"" << r.comment << "\")\n";
                    return 0;
            }
            return 0;
        }
    } catch (const qbmc::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
