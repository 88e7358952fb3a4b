#include "wernick/cli.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace wernick {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << content;
}

} // namespace

Session::Session(const RunConfig& cfg) {
    std::string kb_text = cfg.kb_path.empty() ? builtin_kb_text() : read_file(cfg.kb_path);
    kb = load_kb(kb_text);
    std::string cat_text =
        cfg.catalog_path.empty() ? builtin_catalog_text() : read_file(cfg.catalog_path);
    catalog = parse_catalog(cat_text);
    solver_ = std::make_unique<Solver>(kb);
}

bool parse_problem_ref(const Session& s, const std::string& ref, ProblemSpec& out,
                       std::string& err) {
    if (!ref.empty() && ref.find(',') == std::string::npos) {
        try {
            int idx = std::stoi(ref);
            for (const auto& e : s.catalog)
                if (e.idx == idx) {
                    out = e.problem();
                    return true;
                }
            err = "no catalog problem with index " + ref;
            return false;
        } catch (const std::exception&) {
            err = "bad problem reference: " + ref;
            return false;
        }
    }
    std::vector<std::string> labels;
    std::string tok;
    std::istringstream ls(ref);
    while (std::getline(ls, tok, ',')) labels.push_back(tok);
    if (labels.size() != 3) {
        err = "a problem is an index or a triple like A,B,H";
        return false;
    }
    for (const auto& l : labels)
        if (!s.kb.vocab.has(l)) {
            err = "unknown point label: " + l;
            return false;
        }
    out = ProblemSpec{ref, labels, {"A", "B", "C"}, '?'};
    for (const auto& e : s.catalog)
        if (std::vector<std::string>(e.given) == labels) out.status = e.status;
    return true;
}

int cmd_list(Session& s, const std::string& filter_status, const std::string& index,
             std::ostream& out) {
    int shown = 0;
    for (const auto& e : s.catalog) {
        if (!filter_status.empty() && std::string(1, e.status) != filter_status) continue;
        if (!index.empty() && std::to_string(e.idx) != index) continue;
        out << e.idx << ". " << e.given[0] << ", " << e.given[1] << ", " << e.given[2] << " - "
            << e.status;
        if (!e.note.empty()) out << " [" << e.note << "]";
        out << "\n";
        shown++;
    }
    out << shown << " problem(s)\n";
    return kExitOk;
}

namespace {

void write_artifacts(Session& s, const ProblemSpec& p, const ConstructionPlan& plan,
                     const VerificationReport& rep, const RunConfig& cfg) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    std::string base = cfg.out_dir + "/" + (p.id.find(',') == std::string::npos ? p.id : "custom");
    write_file(base + "_plan.txt", plan.serialize());
    bool all = cfg.format == "all";
    if (all || cfg.format == "text") write_file(base + "_steps.txt", to_text(s.kb, plan).str());
    Scene scene = sample_scene(s.kb, plan.given, cfg.seed);
    if (all || cfg.format == "gclc") write_file(base + ".gclc", to_gclc(s.kb, plan, scene));
    if (all || cfg.format == "svg") write_file(base + ".svg", to_svg(s.kb, plan, scene));
    write_file(base + "_verify.txt", rep.serialize());
}

} // namespace

int cmd_solve(Session& s, const ProblemSpec& p, const RunConfig& cfg, std::ostream& out) {
    auto outcome = s.solver().solve(p, cfg.budget());
    if (!outcome.solved()) {
        out << "problem " << p.id << ": "
            << (outcome.failure->kind == FailKind::Exhausted ? "no construction found"
                                                             : "budget exhausted")
            << " after " << outcome.failure->raw_steps << " raw steps\n";
        if (!outcome.failure->partial.steps.empty())
            out << "constructible objects before exhaustion:\n"
                << outcome.failure->partial.serialize();
        return kExitUnsolved;
    }
    const ConstructionPlan& plan = *outcome.cleaned;
    auto rep = verify(s.kb, plan, p, cfg.instances, cfg.seed, cfg.tolerance());
    out << "problem " << p.id << ": solved, " << plan.steps.size() << " steps (raw "
        << outcome.raw->steps.size() << "), verified " << rep.passed << "/" << rep.tried << "\n\n";
    out << to_text(s.kb, plan).str();
    write_artifacts(s, p, plan, rep, cfg);
    if (!rep.ok()) {
        out << "\nverification FAILED\n" << rep.serialize();
        return kExitVerifyFailed;
    }
    if (p.status == 'U')
        out << "\nWARNING: catalog marks this problem unsolvable; solution is a discrepancy\n";
    return kExitOk;
}

int cmd_verify(Session& s, const ProblemSpec& p, const RunConfig& cfg, std::ostream& out) {
    auto outcome = s.solver().solve(p, cfg.budget());
    if (!outcome.solved()) {
        out << "problem " << p.id << ": unsolved, nothing to verify\n";
        return kExitUnsolved;
    }
    auto rep = verify(s.kb, *outcome.cleaned, p, cfg.instances, cfg.seed, cfg.tolerance());
    out << rep.serialize();
    return rep.ok() ? kExitOk : kExitVerifyFailed;
}

int cmd_render(Session& s, const ProblemSpec& p, const RunConfig& cfg, std::ostream& out) {
    auto outcome = s.solver().solve(p, cfg.budget());
    if (!outcome.solved()) {
        out << "problem " << p.id << ": unsolved, nothing to render\n";
        return kExitUnsolved;
    }
    Scene scene = sample_scene(s.kb, outcome.cleaned->given, cfg.seed);
    if (cfg.format == "gclc") out << to_gclc(s.kb, *outcome.cleaned, scene);
    else if (cfg.format == "svg") out << to_svg(s.kb, *outcome.cleaned, scene);
    else out << to_text(s.kb, *outcome.cleaned).str();
    if (!cfg.out_dir.empty()) {
        auto rep = verify(s.kb, *outcome.cleaned, p, cfg.instances, cfg.seed, cfg.tolerance());
        write_artifacts(s, p, *outcome.cleaned, rep, cfg);
    }
    return kExitOk;
}

int cmd_batch(Session& s, const RunConfig& cfg, std::ostream& out) {
    struct Row {
        int idx = 0;
        char status = '?';
        bool solved = false;
        int clean_len = 0;
        int vpass = 0, vtot = 0;
        double secs = 0;
        bool discrepancy = false;
    };
    out << "# config seed=" << cfg.seed << " instances=" << cfg.instances << " tol=" << cfg.tol
        << " budget_steps=" << cfg.budget_steps << " budget_secs=" << cfg.budget_secs
        << (cfg.only_status.empty() ? "" : " only=" + cfg.only_status) << "\n";
    std::vector<CatalogEntry> todo;
    for (const auto& e : s.catalog)
        if (cfg.only_status.empty() || std::string(1, e.status) == cfg.only_status)
            todo.push_back(e);
    std::vector<Row> rows(todo.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            const auto& e = todo[i];
            ProblemSpec p = e.problem();
            Row r;
            r.idx = e.idx;
            r.status = e.status;
            auto t0 = std::chrono::steady_clock::now();
            auto outcome = s.solver().solve(p, cfg.budget());
            if (outcome.solved()) {
                r.solved = true;
                r.clean_len = int(outcome.cleaned->steps.size());
                auto rep = verify(s.kb, *outcome.cleaned, p, cfg.instances, cfg.seed,
                                  cfg.tolerance());
                r.vpass = rep.passed;
                r.vtot = rep.tried;
                r.discrepancy = (e.status == 'U');
            }
            r.secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rows[i] = r;
        }
    };
    int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; j++) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int solved_s = 0, total_s = 0, solved_total = 0, verified = 0, max_clean = 0;
    std::vector<int> discrepancies, verify_failures;
    for (const auto& r : rows) {
        out << r.idx << "|" << (r.solved ? 1 : 0) << "|" << r.clean_len << "|" << r.vpass << "/"
            << r.vtot;
        if (cfg.timing) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", r.secs);
            out << "|" << buf;
        }
        out << "\n";
        if (r.status == 'S') total_s++;
        if (r.solved) {
            solved_total++;
            max_clean = std::max(max_clean, r.clean_len);
            if (r.status == 'S') solved_s++;
            if (r.vpass == r.vtot && r.vtot > 0) verified++;
            else verify_failures.push_back(r.idx);
            if (r.discrepancy) discrepancies.push_back(r.idx);
        }
    }
    out << "# solved " << solved_total << " (S: " << solved_s << "/" << total_s
        << "), verified " << verified << "/" << solved_total << ", max clean length " << max_clean
        << "\n";
    out << "# discrepancies (status-U problems solved):";
    for (int d : discrepancies) out << " " << d;
    out << (discrepancies.empty() ? " none" : "") << "\n";
    if (!verify_failures.empty()) {
        out << "# verification failures:";
        for (int v : verify_failures) out << " " << v;
        out << "\n";
    }
    return kExitOk;
}

int cmd_check_kb(Session& s, int samples, const RunConfig& cfg, std::ostream& out) {
    auto rep = numeric_check_kb(s.kb, samples, cfg.tolerance(), cfg.seed);
    out << "checked " << rep.checked_facts << " facts on " << rep.samples
        << " random triangles; max residual " << rep.max_residual << "\n";
    if (rep.ok()) {
        out << "no violations\n";
        return kExitOk;
    }
    for (const auto& v : rep.violations)
        out << "VIOLATION seed=" << v.seed << " residual=" << v.residual << " " << v.fact << "\n";
    return kExitVerifyFailed;
}

} // namespace wernick
