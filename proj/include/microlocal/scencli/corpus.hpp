#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>

#include "microlocal/scencli/run.hpp"

namespace microlocal::scencli {

inline constexpr const char* corpus_env = "MICROLOCAL_CORPUS_DIR";

/// Exit codes ranked by how bad they are: 4, 3, 1, 2, 0.
inline int severity(int code)
{
    switch (code) {
    case exit_code::invalid: return 4;
    case exit_code::theorem_violation: return 3;
    case exit_code::expectation_mismatch: return 2;
    case exit_code::hypothesis_failed: return 1;
    default: return 0;
    }
}

inline int worst_exit(const std::vector<RunResult>& rs)
{
    int code = exit_code::consistent;
    for (auto& r : rs)
        if (severity(r.exit_code) > severity(code))
            code = r.exit_code;
    return code;
}

/// Checks files on up to `jobs` threads; results keep the input order.
inline std::vector<RunResult> run_files(const std::vector<std::string>& paths, const RunOptions& opts,
                                        unsigned jobs = 1)
{
    std::vector<RunResult> out(paths.size());
    jobs = std::max(1u, std::min<unsigned>(jobs, unsigned(paths.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < paths.size(); i = next++)
            out[i] = run_file(paths[i], opts);
    };
    if (jobs <= 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    return out;
}

/// The corpus directory: the environment override, else `fallback`.
inline std::string corpus_dir(const std::string& fallback = "corpus")
{
    if (const char* env = std::getenv(corpus_env); env && *env)
        return env;
    return fallback;
}

/// Scenario files directly inside the corpus directory, sorted by name.
inline std::vector<std::string> corpus_files(const std::string& dir)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw InvalidInput("corpus directory '" + dir + "' does not exist");
    std::vector<std::string> out;
    for (auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

/// One document holding every report plus a per-exit-code tally.
inline json corpus_document(const std::vector<RunResult>& rs)
{
    json reports = json::array();
    std::map<std::string, std::size_t> tally;
    for (auto& r : rs) {
        reports.push_back(r.report);
        ++tally[std::to_string(r.exit_code)];
    }
    return {{"schema", "microlocal-corpus-report/1"},
            {"scenarios", rs.size()},
            {"exit_codes", tally},
            {"exit_code", worst_exit(rs)},
            {"reports", reports}};
}

inline std::string emit_corpus(const std::vector<RunResult>& rs, Format format)
{
    if (format == Format::json)
        return dump_canonical(corpus_document(rs));
    std::string out;
    for (auto& r : rs)
        out += render_markdown(r.report) + "\n";
    return out;
}

} // namespace microlocal::scencli
