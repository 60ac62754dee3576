#include <CLI11.hpp>

#include <iostream>

#include "mfs/config.hpp"
#include "mfs/errors.hpp"
#include "mfs/pipeline.hpp"

namespace {

constexpr int kOk = 0, kOther = 1, kParse = 2, kAlarm = 3, kBudget = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multifractal spectra and overlap structure of weighted self-similar systems"};
    std::string config_path, task, out;
    int nmax = 0, threads = -1;
    long long budget = 0;
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--task", task, "spectrum, census, dual, empirical or report");
    app.add_option("--nmax", nmax, "maximal census depth")->check(CLI::Range(1, 60));
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", threads, "OpenMP threads (0 = default)")->check(CLI::NonNegativeNumber);
    app.add_option("--budget", budget, "word budget per enumeration")->check(CLI::PositiveNumber);
    app.footer("Environment overrides (applied before flags): MFS_TASK, MFS_NMAX, MFS_OUT, MFS_THREADS, MFS_BUDGET, MFS_SEED.\n"
               "Exit codes: 0 ok, 1 other error, 2 invalid input, 3 correctness alarm, 4 budget exceeded.");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParse;
    }

    try {
        mfs::RunConfig cfg = mfs::load_config(config_path);
        mfs::apply_env_overrides(cfg);
        if (!task.empty()) cfg.task = mfs::parse_task(task);
        if (nmax > 0) cfg.n_max = nmax;
        if (!out.empty()) cfg.out_dir = out;
        if (threads >= 0) cfg.threads = threads;
        if (budget > 0) cfg.word_budget = static_cast<std::size_t>(budget);
        const auto sum = mfs::run(cfg);
        std::cout << sum.text();
        return kOk;
    } catch (const mfs::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const mfs::InconsistencyError& e) {
        std::cerr << "error: contradictory assertions: " << e.what() << "\n";
        return kParse;
    } catch (const mfs::CorrectnessAlarm& e) {
        std::cerr << "correctness alarm: " << e.what() << "\n";
        return kAlarm;
    } catch (const mfs::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
}
