#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "critgraph/acceptance.hpp"
#include "critgraph/detail/format.hpp"
#include "critgraph/errors.hpp"
#include "critgraph/finite_graph.hpp"
#include "critgraph/kernel.hpp"
#include "critgraph/limit_sampler.hpp"
#include "critgraph/montecarlo.hpp"
#include "critgraph/process.hpp"
#include "critgraph/urn.hpp"

namespace critgraph::cli {

enum ExitCode : int { ok = 0, parameter_failure = 1, gate_failure = 2, partial_harvest = 3 };

using Cell = std::variant<std::int64_t, double, std::string>;

/// Column-oriented output rendered as CSV or a JSON array of objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void write_csv(std::ostream& out) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "") << columns[i];
        }
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "");
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>) {
                            out << detail::format_real(v);
                        } else {
                            out << v;
                        }
                    },
                    row[i]);
            }
            out << '\n';
        }
    }

    void write_json(std::ostream& out) const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            nlohmann::ordered_json obj;
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::visit([&](const auto& v) { obj[columns[i]] = v; }, row[i]);
            }
            arr.push_back(std::move(obj));
        }
        out << arr.dump(2) << '\n';
    }
};

inline std::string join_reals(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s += (i ? ";" : "") + detail::format_real(xs[i]);
    }
    return s;
}

inline std::string class_label(const std::optional<Multigraph>& k) {
    if (!k) {
        return "";
    }
    const auto id = kernel_class_id(*k);
    return id ? std::to_string(*id) : "other";
}

struct Common {
    std::optional<std::uint64_t> seed;
    std::size_t trials = 1;
    std::string output;
    std::string format = "csv";
    std::size_t jobs = 1;
};

inline void add_common(CLI::App* app, Common& c, bool stochastic = true) {
    if (stochastic) {
        app->add_option("--seed", c.seed, "master seed (required)")->required();
        app->add_option("--trials", c.trials, "number of independent trials")->check(CLI::PositiveNumber);
        app->add_option("--jobs", c.jobs, "worker threads; output does not depend on it")->check(CLI::PositiveNumber);
    }
    app->add_option("--output", c.output, "output file (default: standard output)");
    app->add_option("--format", c.format, "csv, json or text")->check(CLI::IsMember({"csv", "json", "text"}));
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw parameter_error("cannot open output file " + path);
            }
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

inline void emit(const Table& t, const Common& c, std::ostream& out) {
    Output o(c.output, out);
    if (c.format == "json") {
        t.write_json(o.stream());
    } else if (c.format == "csv") {
        t.write_csv(o.stream());
    } else {
        throw parameter_error("text format is only available for crt, component and kernels");
    }
}

inline RngStream base_stream(const Common& c, const std::string& command) { return RngStream(*c.seed).child(command); }

/// Parses and runs one command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Samplers for scaling limits of critical random graph components"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    Common common;

    long crt_segments = 10;
    auto* crt = app.add_subcommand("crt", "stick-breaking trees");
    add_common(crt, common);
    crt->add_option("--segments", crt_segments, "segments per tree")->check(CLI::NonNegativeNumber);

    int procedure = 2;
    long comp_k = 1;
    long comp_segments = 0;
    auto* component = app.add_subcommand("component", "a limit component conditioned on its surplus");
    add_common(component, common);
    component->add_option("--procedure", procedure, "1: glued trees, 2: stick-breaking from a core")
        ->check(CLI::IsMember({1, 2}));
    component->add_option("--k", comp_k, "surplus")->check(CLI::NonNegativeNumber);
    component->add_option("--segments", comp_segments, "stick-breaking segments (per tree for procedure 1)")
        ->check(CLI::NonNegativeNumber);

    long kernel_k = 2;
    auto* kernels = app.add_subcommand("kernels", "3-regular kernels");
    kernels->require_subcommand(1);
    auto* kernels_enum = kernels->add_subcommand("enumerate", "exact class probabilities");
    add_common(kernels_enum, common, false);
    kernels_enum->add_option("--k", kernel_k, "surplus, 2..4")->required();
    auto* kernels_sample = kernels->add_subcommand("sample", "draw kernels by half-edge pairing");
    add_common(kernels_sample, common);
    kernels_sample->add_option("--k", kernel_k, "surplus, >= 2")->required();

    long core_k = 2;
    auto* core = app.add_subcommand("core-lengths", "core path lengths of a surplus-k component");
    add_common(core, common);
    core->add_option("--k", core_k, "surplus, >= 1")->required();

    long urn_k = 2;
    std::size_t urn_m = 2;
    std::size_t urn_steps = 100;
    std::size_t urn_stride = 0;
    auto* urn = app.add_subcommand("urn", "continuous and discrete urns");
    urn->require_subcommand(1);
    auto* urn_cont = urn->add_subcommand("continuous", "length urn started from a random core");
    add_common(urn_cont, common);
    urn_cont->add_option("--k", urn_k, "surplus of the starting core, >= 2 (m = 3k - 3 colors)");
    urn_cont->add_option("--steps", urn_steps, "steps");
    urn_cont->add_option("--stride", urn_stride, "checkpoint every this many steps (default: only the end)");
    auto* urn_polya = urn->add_subcommand("polya", "discrete Polya urn adding two balls per draw");
    add_common(urn_polya, common);
    urn_polya->add_option("--m", urn_m, "colors, >= 2");
    urn_polya->add_option("--steps", urn_steps, "steps");
    urn_polya->add_option("--stride", urn_stride, "checkpoint every this many steps (default: only the end)");

    HarvestConfig harvest_cfg;
    harvest_cfg.count = 100;
    std::size_t gnp_min_size = 2;
    auto* gnp = app.add_subcommand("gnp", "finite critical random graphs");
    gnp->require_subcommand(1);
    auto* gnp_sample = gnp->add_subcommand("sample", "components of one G(n, 1/n + lambda n^{-4/3})");
    add_common(gnp_sample, common);
    gnp_sample->add_option("--n", harvest_cfg.n, "vertices")->required();
    gnp_sample->add_option("--lambda", harvest_cfg.lambda, "position in the critical window");
    gnp_sample->add_option("--min-size", gnp_min_size, "omit components smaller than this");
    auto* gnp_harvest = gnp->add_subcommand("harvest", "components with a given surplus and size window");
    add_common(gnp_harvest, common);
    gnp_harvest->add_option("--n", harvest_cfg.n, "vertices")->required();
    gnp_harvest->add_option("--lambda", harvest_cfg.lambda, "position in the critical window");
    gnp_harvest->add_option("--k", harvest_cfg.surplus, "surplus")->required();
    gnp_harvest->add_option("--window-lo", harvest_cfg.window_lo, "lower size bound in units of n^{2/3}");
    gnp_harvest->add_option("--window-hi", harvest_cfg.window_hi, "upper size bound in units of n^{2/3}");
    gnp_harvest->add_option("--count", harvest_cfg.count, "components to collect")->check(CLI::PositiveNumber);
    gnp_harvest->add_option("--max-graphs", harvest_cfg.max_graphs, "graph budget")->check(CLI::PositiveNumber);

    std::string suite = "core";
    auto* verify = app.add_subcommand("verify", "run acceptance gates and print a JSON report");
    add_common(verify, common);
    verify->add_option("--suite", suite, "core, finite, all, or a criterion number");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return parameter_failure;
    }

    try {
        if (crt->parsed()) {
            const auto segments = static_cast<std::size_t>(crt_segments);
            if (common.format == "text") {
                const auto trees = monte_carlo(base_stream(common, "crt"), common.trials,
                                               [&](RngStream& s) { return stick_break(s, segments); }, common.jobs);
                Output o(common.output, out);
                for (std::size_t i = 0; i < trees.size(); ++i) {
                    o.stream() << "# trial " << i << '\n';
                    write_text(o.stream(), trees[i]);
                }
                return ok;
            }
            Table t{{"trial", "segments", "total_length", "root_leaf1_distance", "edges"}, {}};
            const auto rows = monte_carlo(base_stream(common, "crt"), common.trials, [&](RngStream& s) {
                const MetricTree tree = stick_break(s, segments);
                const double d = segments ? tree.vertex_distance(tree.roots()[0], tree.mark("leaf1")) : 0.0;
                return std::vector<double>{tree.total_length(), d, static_cast<double>(tree.edge_count())};
            }, common.jobs);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                t.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(segments), rows[i][0], rows[i][1],
                                  static_cast<std::int64_t>(rows[i][2])});
            }
            emit(t, common, out);
            return ok;
        }

        if (component->parsed()) {
            const auto segments = static_cast<std::size_t>(comp_segments);
            auto sample = [&](RngStream& s) {
                return procedure == 1 ? sample_component_p1(s, comp_k, std::max<std::size_t>(segments, 1))
                                      : sample_component_p2(s, comp_k, segments);
            };
            const auto comps = monte_carlo(base_stream(common, "component"), common.trials, sample, common.jobs);
            if (common.format == "text") {
                Output o(common.output, out);
                for (std::size_t i = 0; i < comps.size(); ++i) {
                    o.stream() << "# trial " << i << '\n';
                    write_text(o.stream(), comps[i].space);
                }
                return ok;
            }
            Table t{{"trial", "procedure", "k", "kernel_class", "core_lengths", "core_total", "total_length", "cycle_rank"}, {}};
            for (std::size_t i = 0; i < comps.size(); ++i) {
                const auto lengths = kernel_path_lengths(comps[i]);
                double core_total = 0.0;
                for (const double l : lengths) {
                    core_total += l;
                }
                t.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(procedure), static_cast<std::int64_t>(comp_k),
                                  class_label(comps[i].kernel), join_reals(lengths), core_total,
                                  comps[i].space.skeleton().total_length(),
                                  static_cast<std::int64_t>(comps[i].space.cycle_rank())});
            }
            emit(t, common, out);
            return ok;
        }

        if (kernels_enum->parsed()) {
            const auto& classes = enumerate_kernels(kernel_k);
            if (common.format == "text") {
                Output o(common.output, out);
                for (std::size_t i = 0; i < classes.size(); ++i) {
                    o.stream() << "# class " << i << " probability " << detail::format_real(classes[i].probability) << '\n';
                    write_kernel(o.stream(), classes[i].representative);
                }
                return ok;
            }
            Table t{{"class", "loops", "weight", "labelings", "probability", "edges"}, {}};
            for (std::size_t i = 0; i < classes.size(); ++i) {
                const auto& c = classes[i];
                t.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(c.representative.loop_count()), c.weight,
                                  static_cast<std::int64_t>(c.labeled_count), c.probability, code_string(c.code)});
            }
            emit(t, common, out);
            return ok;
        }

        if (kernels_sample->parsed()) {
            const auto graphs = monte_carlo(base_stream(common, "kernels"), common.trials,
                                            [&](RngStream& s) { return sample_kernel(s, kernel_k); }, common.jobs);
            if (common.format == "text") {
                Output o(common.output, out);
                for (std::size_t i = 0; i < graphs.size(); ++i) {
                    o.stream() << "# trial " << i << '\n';
                    write_kernel(o.stream(), graphs[i]);
                }
                return ok;
            }
            Table t{{"trial", "kernel_class", "loops", "edges"}, {}};
            for (std::size_t i = 0; i < graphs.size(); ++i) {
                const auto code = graphs[i].canonical_code();
                t.rows.push_back({static_cast<std::int64_t>(i), class_label(graphs[i]),
                                  static_cast<std::int64_t>(graphs[i].loop_count()), code ? code_string(*code) : ""});
            }
            emit(t, common, out);
            return ok;
        }

        if (core->parsed()) {
            const auto cores = monte_carlo(base_stream(common, "core-lengths"), common.trials,
                                           [&](RngStream& s) { return sample_core_lengths(s, core_k); }, common.jobs);
            Table t{{"trial", "k", "total", "lengths"}, {}};
            for (std::size_t i = 0; i < cores.size(); ++i) {
                t.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(core_k), cores[i].total,
                                  join_reals(cores[i].lengths)});
            }
            emit(t, common, out);
            return ok;
        }

        if (urn_cont->parsed()) {
            const std::size_t stride = urn_stride == 0 ? std::max<std::size_t>(urn_steps, 1) : urn_stride;
            const auto runs = monte_carlo(base_stream(common, "urn.continuous"), common.trials, [&](RngStream& s) {
                return urn_run(s, urn_init(sample_core_lengths(s, urn_k)), urn_steps, stride);
            }, common.jobs);
            const std::size_t m = core_edge_count(urn_k);
            Table t{{"trial", "n"}, {}};
            for (std::size_t j = 1; j <= m; ++j) {
                t.columns.push_back("L_" + std::to_string(j));
            }
            for (std::size_t j = 1; j <= m; ++j) {
                t.columns.push_back("N_" + std::to_string(j));
            }
            t.columns.push_back("C");
            for (std::size_t i = 0; i < runs.size(); ++i) {
                for (const UrnState& st : runs[i]) {
                    std::vector<Cell> row{static_cast<std::int64_t>(i), static_cast<std::int64_t>(st.step)};
                    for (const double l : st.lengths) {
                        row.emplace_back(l);
                    }
                    for (const auto n : st.counts) {
                        row.emplace_back(static_cast<std::int64_t>(n));
                    }
                    row.emplace_back(st.total);
                    t.rows.push_back(std::move(row));
                }
            }
            emit(t, common, out);
            return ok;
        }

        if (urn_polya->parsed()) {
            const std::size_t stride = urn_stride == 0 ? std::max<std::size_t>(urn_steps, 1) : urn_stride;
            const auto runs = monte_carlo(base_stream(common, "urn.polya"), common.trials,
                                          [&](RngStream& s) { return polya_run(s, urn_m, urn_steps, stride); }, common.jobs);
            Table t{{"trial", "n"}, {}};
            for (std::size_t j = 1; j <= urn_m; ++j) {
                t.columns.push_back("N_" + std::to_string(j));
            }
            for (std::size_t i = 0; i < runs.size(); ++i) {
                for (std::size_t c = 0; c < runs[i].size(); ++c) {
                    const std::size_t n = c == 0 ? 0 : std::min(c * stride, urn_steps);
                    std::vector<Cell> row{static_cast<std::int64_t>(i), static_cast<std::int64_t>(n)};
                    for (const auto count : runs[i][c]) {
                        row.emplace_back(static_cast<std::int64_t>(count));
                    }
                    t.rows.push_back(std::move(row));
                }
            }
            emit(t, common, out);
            return ok;
        }

        const std::vector<std::string> component_columns{"trial", "n", "lambda", "size", "surplus", "sigma_hat", "lengths",
                                                         "kernel_class"};
        auto component_row = [&](std::size_t trial, const ComponentSummary& s) {
            return std::vector<Cell>{static_cast<std::int64_t>(trial), static_cast<std::int64_t>(harvest_cfg.n), harvest_cfg.lambda,
                                     static_cast<std::int64_t>(s.size), static_cast<std::int64_t>(s.surplus), s.sigma_hat,
                                     join_reals(s.normalized),
                                     s.surplus >= 2 ? class_label(std::optional<Multigraph>(s.kernel)) : std::string{}};
        };

        if (gnp_sample->parsed()) {
            const double p = critical_p(harvest_cfg.n, harvest_cfg.lambda);
            const auto per_trial = monte_carlo(base_stream(common, "gnp.sample"), common.trials, [&](RngStream& s) {
                std::vector<ComponentSummary> kept;
                for (const auto& c : sample_gnp_components(s, harvest_cfg.n, p)) {
                    if (c.size() >= gnp_min_size) {
                        ComponentSummary summary = decompose(c);
                        summary.attach_host(harvest_cfg.n);
                        kept.push_back(std::move(summary));
                    }
                }
                return kept;
            }, common.jobs);
            Table t{component_columns, {}};
            for (std::size_t i = 0; i < per_trial.size(); ++i) {
                for (const auto& s : per_trial[i]) {
                    t.rows.push_back(component_row(i, s));
                }
            }
            emit(t, common, out);
            return ok;
        }

        if (gnp_harvest->parsed()) {
            harvest_cfg.jobs = common.jobs;
            Table t{component_columns, {}};
            int code = ok;
            std::vector<ComponentSummary> collected;
            try {
                collected = harvest_conditioned(base_stream(common, "gnp.harvest"), harvest_cfg).components;
            } catch (const partial_harvest_error& e) {
                err << "critgraph: " << e.what() << '\n';
                collected = e.collected();
                code = partial_harvest;
            }
            for (std::size_t i = 0; i < collected.size(); ++i) {
                t.rows.push_back(component_row(i, collected[i]));
            }
            emit(t, common, out);
            return code;
        }

        if (verify->parsed()) {
            acceptance::Options opts{*common.seed, common.jobs};
            nlohmann::ordered_json report = nlohmann::ordered_json::array();
            bool all_pass = true;
            for (const auto& entry : acceptance::select(suite)) {
                const acceptance::Criterion c = entry.run(opts);
                all_pass = all_pass && c.pass();
                for (const auto& r : c.checks) {
                    report.push_back({{"test", std::to_string(c.id) + "." + c.name + "." + r.test},
                                      {"n", r.n},
                                      {"statistic", r.statistic},
                                      {"threshold", r.threshold},
                                      {"pass", r.pass},
                                      {"seed", r.seed}});
                }
            }
            Output o(common.output, out);
            o.stream() << report.dump(2) << '\n';
            return all_pass ? ok : gate_failure;
        }
    } catch (const partial_harvest_error& e) {
        err << "critgraph: " << e.what() << '\n';
        return partial_harvest;
    } catch (const std::exception& e) {
        err << "critgraph: " << e.what() << '\n';
        return parameter_failure;
    }
    return parameter_failure;
}

} // namespace critgraph::cli
