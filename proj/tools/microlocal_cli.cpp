#include <iostream>

#include <CLI11.hpp>

#include "microlocal/scencli.hpp"

using namespace microlocal::scencli;

namespace {

struct Common
{
    std::string format = "json";
    unsigned jobs = 1;
    bool strict = false;
    std::string ring;

    void attach(CLI::App* app)
    {
        app->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "markdown"}));
        app->add_option("--jobs", jobs, "scenarios checked in parallel")->check(CLI::Range(1u, 256u));
        app->add_flag("--strict-hypotheses", strict, "exit 2 when a hypothesis fails");
        app->add_option("--ring", ring, "override the scenario ring: q, z or fp:<p>");
    }

    RunOptions options() const
    {
        RunOptions o;
        o.strict_hypotheses = strict;
        if (!ring.empty())
            o.ring = ring;
        return o;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Checks scenario files against the deformation, tower and micro-support theorems"};
    app.require_subcommand(1);

    Common check_opts;
    std::vector<std::string> files;
    auto* check = app.add_subcommand("check", "check scenario files");
    check->add_option("files", files, "scenario files")->required();
    check_opts.attach(check);

    Common corpus_opts;
    std::string dir;
    auto* corpus = app.add_subcommand("corpus", "check every bundled scenario");
    corpus->add_option("--dir", dir, std::string("corpus directory (default: $") + corpus_env + " or ./corpus)");
    corpus_opts.attach(corpus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_code::invalid;
    }

    try {
        if (*check) {
            auto rs = run_files(files, check_opts.options(), check_opts.jobs);
            Format f = parse_format(check_opts.format);
            if (rs.size() == 1) {
                std::cout << emit_report(rs.front().report, f);
            } else if (f == Format::json) {
                json all = json::array();
                for (auto& r : rs)
                    all.push_back(r.report);
                std::cout << dump_canonical(all);
            } else {
                for (auto& r : rs)
                    std::cout << render_markdown(r.report) << "\n";
            }
            return worst_exit(rs);
        }
        auto paths = corpus_files(dir.empty() ? corpus_dir() : dir);
        auto rs = run_files(paths, corpus_opts.options(), corpus_opts.jobs);
        std::cout << emit_corpus(rs, parse_format(corpus_opts.format));
        return worst_exit(rs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::invalid;
    }
}
