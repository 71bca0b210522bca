#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <execution>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hestonlt/asymptotics.hpp"
#include "hestonlt/calibration.hpp"
#include "hestonlt/errors.hpp"
#include "hestonlt/fourier.hpp"
#include "hestonlt/heston.hpp"

namespace hestonlt::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::optional<double> kappa, theta, sigma, rho, y0;
    std::string params_path;
    std::vector<double> maturities;
    std::string strike_grid;
    std::string x_grid;
    std::string convention = "rate";
    double spot = 1.0;
    std::optional<double> strike;
    std::optional<double> x;
    std::string out_path;
    std::string format;
    std::string quotes_path;
    std::string model = "two-stage";
    int budget = 2000;
};

double round12(double v) {
    if (!std::isfinite(v)) return v;
    const std::string s = format_number(v);
    double out = v;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

double parse_double(std::string_view text, const std::string& flag) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw UsageError(flag + ": '" + std::string(text) + "' is not a number");
    }
    return value;
}

std::vector<double> parse_triple(const std::string& text, const std::string& flag) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        parts.push_back(parse_double(std::string_view(text).substr(start, colon - start), flag));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3) throw UsageError(flag + ": expected lo:hi:" + (flag == "--x" ? "n" : "step"));
    return parts;
}

HestonParams load_params(const Options& o) {
    const bool any_flag = o.kappa || o.theta || o.sigma || o.rho || o.y0;
    if (!o.params_path.empty()) {
        if (any_flag) throw UsageError("--params cannot be combined with --kappa/--theta/--sigma/--rho/--y0");
        std::ifstream in(o.params_path);
        if (!in) throw UsageError("--params: cannot open '" + o.params_path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(std::string("--params: ") + e.what());
        }
        auto get = [&](const char* key) {
            if (!j.is_object() || !j.contains(key) || !j[key].is_number()) {
                throw UsageError(std::string("--params: missing numeric key '") + key + "'");
            }
            return j[key].get<double>();
        };
        return validate_params(get("kappa"), get("theta"), get("sigma"), get("rho"), get("y0"));
    }
    const std::pair<const std::optional<double>*, const char*> required[] = {
        {&o.kappa, "--kappa"}, {&o.theta, "--theta"}, {&o.sigma, "--sigma"}, {&o.rho, "--rho"}, {&o.y0, "--y0"}};
    for (const auto& [value, flag] : required) {
        if (!*value) throw UsageError(std::string(flag) + " is required (or pass --params <json>)");
    }
    return validate_params(*o.kappa, *o.theta, *o.sigma, *o.rho, *o.y0);
}

StrikeConvention convention_of(const Options& o) {
    return o.convention == "total" ? StrikeConvention::total : StrikeConvention::rate;
}

struct GridPoint {
    double t;
    double strike;
    double x_total;
};

std::vector<GridPoint> build_grid(const Options& o) {
    if (o.maturities.empty()) throw UsageError("--t is required");
    if (o.strike_grid.empty() == o.x_grid.empty()) throw UsageError("exactly one of --strikes or --x is required");
    std::vector<GridPoint> grid;
    if (!o.strike_grid.empty()) {
        const auto g = parse_triple(o.strike_grid, "--strikes");
        if (!(g[0] > 0.0) || !(g[1] >= g[0]) || !(g[2] > 0.0)) {
            throw UsageError("--strikes: need 0 < lo <= hi and step > 0");
        }
        const auto count = static_cast<long>(std::floor((g[1] - g[0]) / g[2] + 1e-9)) + 1;
        for (double t : o.maturities) {
            for (long i = 0; i < count; ++i) {
                const double k = g[0] + static_cast<double>(i) * g[2];
                grid.push_back({t, k, std::log(k / o.spot)});
            }
        }
        return grid;
    }
    const auto g = parse_triple(o.x_grid, "--x");
    const double n = g[2];
    if (!(n >= 1.0) || n != std::floor(n)) throw UsageError("--x: count must be an integer >= 1");
    if (!(g[1] >= g[0])) throw UsageError("--x: need lo <= hi");
    const auto count = static_cast<long>(n);
    for (double t : o.maturities) {
        for (long i = 0; i < count; ++i) {
            const double x = count == 1 ? g[0] : g[0] + (g[1] - g[0]) * static_cast<double>(i) / (count - 1);
            const double x_total = convention_of(o) == StrikeConvention::rate ? x * t : x;
            grid.push_back({t, o.spot * std::exp(x_total), x_total});
        }
    }
    return grid;
}

struct SmileRow {
    GridPoint point;
    double x_rate = 0.0;
    double sigma_inf = 0.0;
    double sigma_first = 0.0;
    double sigma_exact = 0.0;
};

SmileRow smile_row(const HestonParams& params, const GridPoint& p) {
    SmileRow row;
    row.point = p;
    row.x_rate = p.x_total / p.t;
    row.sigma_inf = std::sqrt(sigma_inf_sq(params, row.x_rate));
    try {
        row.sigma_first = std::sqrt(implied_var_asymptotic(params, row.x_rate, p.t));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonPositiveResult) throw;
        row.sigma_first = std::numeric_limits<double>::quiet_NaN();
    }
    row.sigma_exact = exact_implied_vol(params, StrikeSpec{StrikeConvention::total, p.x_total}, p.t);
    return row;
}

// Grid points are independent; evaluate them concurrently and keep input order.
std::vector<SmileRow> evaluate_grid(const HestonParams& params, const std::vector<GridPoint>& grid) {
    std::vector<SmileRow> rows(grid.size());
    std::vector<std::exception_ptr> failures(grid.size());
    std::vector<std::size_t> index(grid.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
    std::for_each(std::execution::par, index.begin(), index.end(), [&](std::size_t i) {
        try {
            rows[i] = smile_row(params, grid[i]);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    });
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return rows;
}

void write_smile(const std::vector<SmileRow>& rows, bool with_errors, const std::string& format, std::ostream& out) {
    if (format == "json") {
        json arr = json::array();
        for (const SmileRow& r : rows) {
            const double exact = round12(r.sigma_exact), s0 = round12(r.sigma_inf), s1 = round12(r.sigma_first);
            json obj = {{"maturity", round12(r.point.t)}, {"strike", round12(r.point.strike)},
                        {"x", round12(r.x_rate)},        {"sigma_inf", s0},
                        {"sigma_first_order", s1},       {"sigma_exact", exact}};
            if (with_errors) {
                obj["error_zeroth"] = round12(std::abs(exact - s0));
                obj["error_first"] = round12(std::abs(exact - s1));
            }
            arr.push_back(obj);
        }
        out << arr.dump(2) << '\n';
        return;
    }
    out << "maturity,strike,x,sigma_inf,sigma_first_order,sigma_exact";
    if (with_errors) out << ",error_zeroth,error_first";
    out << '\n';
    for (const SmileRow& r : rows) {
        // Errors come from the printed values so the columns recompute exactly.
        const double exact = round12(r.sigma_exact), s0 = round12(r.sigma_inf), s1 = round12(r.sigma_first);
        out << format_number(r.point.t) << ',' << format_number(r.point.strike) << ',' << format_number(r.x_rate)
            << ',' << format_number(s0) << ',' << format_number(s1) << ',' << format_number(exact);
        if (with_errors) {
            out << ',' << format_number(std::abs(exact - s0)) << ',' << format_number(std::abs(exact - s1));
        }
        out << '\n';
    }
}

json pricing_json(const PricingResult& r) {
    json j = {{"normalized_price", round12(r.normalized_price)},
              {"residue_part", round12(r.residue_part)},
              {"correction_part", round12(r.correction_part)}};
    if (r.method == PricingMethod::fourier) j["error_estimate"] = round12(r.error_estimate);
    return j;
}

void command_price(const Options& o, std::ostream& out) {
    const HestonParams params = load_params(o);
    if (o.maturities.size() != 1) throw UsageError("--t: price takes exactly one maturity");
    if (o.strike.has_value() == o.x.has_value()) throw UsageError("exactly one of --strike or --x is required");
    const double t = o.maturities.front();
    double x_total = 0.0;
    if (o.strike) {
        if (!(*o.strike > 0.0)) throw UsageError("--strike: must be positive");
        x_total = std::log(*o.strike / o.spot);
    } else {
        x_total = StrikeSpec{convention_of(o), *o.x}.total_log_moneyness(t);
    }
    const PricingResult asym = call_price_asymptotic(params, x_total / t, t);
    const PricingResult exact = fourier_price(params, StrikeSpec{StrikeConvention::total, x_total}, t);

    if (o.format == "csv") {
        out << "method,normalized_price,residue_part,correction_part\n";
        for (const auto& [name, r] : {std::pair{"asymptotic", asym}, std::pair{"fourier", exact}}) {
            out << name << ',' << format_number(r.normalized_price) << ',' << format_number(r.residue_part) << ','
                << format_number(r.correction_part) << '\n';
        }
        return;
    }
    const json j = {{"maturity", round12(t)},
                    {"spot", round12(o.spot)},
                    {"strike", round12(o.spot * std::exp(x_total))},
                    {"x_total", round12(x_total)},
                    {"x", round12(x_total / t)},
                    {"asymptotic", pricing_json(asym)},
                    {"fourier", pricing_json(exact)}};
    out << j.dump(2) << '\n';
}

void command_calibrate(const Options& o, std::ostream& out) {
    const HestonParams init = load_params(o);
    std::ifstream in(o.quotes_path);
    if (!in) throw UsageError("--quotes: cannot open '" + o.quotes_path + "'");
    const QuoteSet quotes = load_quotes(in);

    CalibrationResult result = [&] {
        if (o.model == "two-stage") return calibrate_two_stage(quotes, init, o.budget, o.budget);
        return calibrate(quotes, init, o.model == "fourier" ? ModelKind::fourier : ModelKind::asymptotic, o.budget);
    }();

    json residuals = json::array();
    for (double r : result.per_quote_residuals) residuals.push_back(round12(r));
    const json j = {{"kappa", round12(result.params.kappa())},
                    {"theta", round12(result.params.theta())},
                    {"sigma", round12(result.params.sigma())},
                    {"rho", round12(result.params.rho())},
                    {"y0", round12(result.params.y0())},
                    {"objective", round12(result.objective_value)},
                    {"iterations", result.iterations},
                    {"converged", result.converged},
                    {"residuals", residuals}};
    out << j.dump(2) << '\n';
}

void add_param_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--kappa", o.kappa, "mean-reversion speed");
    cmd->add_option("--theta", o.theta, "long-run variance");
    cmd->add_option("--sigma", o.sigma, "vol of variance");
    cmd->add_option("--rho", o.rho, "spot/variance correlation");
    cmd->add_option("--y0", o.y0, "initial variance");
    cmd->add_option("--params", o.params_path, "JSON file with kappa, theta, sigma, rho, y0");
    cmd->add_option("--out", o.out_path, "output path (default stdout)");
}

void add_maturities(CLI::App* cmd, Options& o) {
    cmd->add_option("--t", o.maturities, "maturities in years, comma separated")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.12g}", value); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Large-maturity Heston smile asymptotics and reference pricer", "hestonlt"};
    app.require_subcommand(1);

    CLI::App* price = app.add_subcommand("price", "asymptotic and Fourier price of one call");
    add_param_flags(price, o);
    add_maturities(price, o);
    price->add_option("--strike", o.strike, "strike (with --spot)");
    price->add_option("--x", o.x, "log-moneyness, see --convention");
    price->add_option("--spot", o.spot, "spot price")->check(CLI::PositiveNumber);
    price->add_option("--convention", o.convention, "x is per year (rate) or total")
        ->check(CLI::IsMember({"rate", "total"}));
    price->add_option("--format", o.format, "csv or json (default json)")->check(CLI::IsMember({"csv", "json"}));

    CLI::App* smile = app.add_subcommand("smile", "asymptotic vs exact implied vols on a grid");
    CLI::App* compare = app.add_subcommand("compare", "smile with zeroth and first order errors");
    for (CLI::App* cmd : {smile, compare}) {
        add_param_flags(cmd, o);
        add_maturities(cmd, o);
        auto* strikes = cmd->add_option("--strikes", o.strike_grid, "strike grid lo:hi:step (with --spot)");
        auto* xs = cmd->add_option("--x", o.x_grid, "log-moneyness grid lo:hi:n, see --convention");
        strikes->excludes(xs);
        cmd->add_option("--spot", o.spot, "spot price")->check(CLI::PositiveNumber);
        cmd->add_option("--convention", o.convention, "x is per year (rate) or total")
            ->check(CLI::IsMember({"rate", "total"}));
        cmd->add_option("--format", o.format, "csv or json (default csv)")->check(CLI::IsMember({"csv", "json"}));
    }

    CLI::App* cal = app.add_subcommand("calibrate", "fit parameters to a quote file");
    add_param_flags(cal, o);
    cal->add_option("--quotes", o.quotes_path, "quote CSV")->required();
    cal->add_option("--model", o.model, "asymptotic, fourier or two-stage")
        ->check(CLI::IsMember({"asymptotic", "fourier", "two-stage"}));
    cal->add_option("--budget", o.budget, "optimizer iterations per stage")->check(CLI::Range(1, 1000000));
    cal->add_option("--format", o.format, "json")->check(CLI::IsMember({"json"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        std::ofstream file;
        if (!o.out_path.empty()) {
            file.open(o.out_path, std::ios::binary);
            if (!file) throw UsageError("--out: cannot open '" + o.out_path + "' for writing");
        }
        std::ostream& sink = o.out_path.empty() ? out : file;

        if (price->parsed()) {
            command_price(o, sink);
        } else if (smile->parsed() || compare->parsed()) {
            const HestonParams params = load_params(o);
            const std::vector<GridPoint> grid = build_grid(o);
            write_smile(evaluate_grid(params, grid), compare->parsed(), o.format, sink);
        } else if (cal->parsed()) {
            command_calibrate(o, sink);
        }
        sink.flush();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace hestonlt::cli
