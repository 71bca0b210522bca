#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "hestonlt/black_scholes.hpp"
#include "hestonlt/calibration.hpp"
#include "hestonlt/errors.hpp"

namespace hestonlt {

namespace {

constexpr std::string_view kColumns[] = {"maturity_years", "strike", "spot", "kind", "value", "weight"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

// from_chars ignores the global locale, so '.' is always the decimal separator.
double parse_number(std::string_view field, std::size_t row, std::string_view column) {
    double value = 0.0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError(row, std::string(column), "not a number: '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

double Quote::total_log_moneyness() const { return std::log(strike / spot); }

double Quote::rate_log_moneyness() const { return total_log_moneyness() / maturity; }

void validate_quote(const Quote& q, std::size_t row) {
    if (!(q.maturity > 0.0)) throw ParseError(row, "maturity_years", "must be positive");
    if (!(q.strike > 0.0)) throw ParseError(row, "strike", "must be positive");
    if (!(q.spot > 0.0)) throw ParseError(row, "spot", "must be positive");
    if (!(q.weight >= 0.0)) throw ParseError(row, "weight", "must be non-negative");
    if (q.kind == QuoteKind::implied_vol) {
        if (!(q.value > 0.0 && q.value < 5.0)) throw ParseError(row, "value", "implied vol must lie in (0, 5)");
    } else {
        const double intrinsic = std::max(0.0, 1.0 - q.strike / q.spot);
        if (!(q.value > intrinsic && q.value < 1.0)) {
            throw ParseError(row, "value", "normalized price outside the no-arbitrage bounds");
        }
    }
}

QuoteSet load_quotes(std::istream& in, QuoteFormat /*format*/) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    bool has_weight = false;
    QuoteSet out;

    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const std::vector<std::string_view> fields = split(line);
        if (!have_header) {
            std::string_view first = fields[0];
            if (first.starts_with("\xEF\xBB\xBF")) first.remove_prefix(3);
            const bool base_ok = fields.size() >= 5 && first == kColumns[0] &&
                                 std::equal(fields.begin() + 1, fields.begin() + 5, std::begin(kColumns) + 1);
            has_weight = fields.size() == 6 && fields[5] == kColumns[5];
            if (!base_ok || fields.size() > 6 || (fields.size() == 6 && !has_weight)) {
                throw ParseError(row, std::string(first), "expected header maturity_years,strike,spot,kind,value[,weight]");
            }
            have_header = true;
            continue;
        }
        const std::size_t expected = has_weight ? 6 : 5;
        if (fields.size() != expected && !(has_weight && fields.size() == 5)) {
            throw ParseError(row, std::string(kColumns[std::min(fields.size(), expected) - 1]),
                             "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
        }
        Quote q;
        q.maturity = parse_number(fields[0], row, kColumns[0]);
        q.strike = parse_number(fields[1], row, kColumns[1]);
        q.spot = parse_number(fields[2], row, kColumns[2]);
        if (fields[3] == "iv") {
            q.kind = QuoteKind::implied_vol;
        } else if (fields[3] == "price") {
            q.kind = QuoteKind::normalized_price;
        } else {
            throw ParseError(row, "kind", "expected 'iv' or 'price', got '" + std::string(fields[3]) + "'");
        }
        q.value = parse_number(fields[4], row, kColumns[4]);
        if (fields.size() == 6 && !fields[5].empty()) q.weight = parse_number(fields[5], row, kColumns[5]);
        validate_quote(q, row);
        out.quotes.push_back(q);
    }
    if (!have_header) throw ParseError(1, "maturity_years", "missing header");
    if (out.empty()) throw Error(ErrorCode::EmptyQuoteSet, "quote file has no data rows");
    return out;
}

double quote_implied_vol(const Quote& q) {
    if (q.kind == QuoteKind::implied_vol) return q.value;
    return implied_vol(q.value, q.total_log_moneyness(), q.maturity);
}

}  // namespace hestonlt
