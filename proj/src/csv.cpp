#include "bbsm/csv.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <vector>

#include "bbsm/error.hpp"

namespace bbsm {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out(1);
    for (char c : line) {
        if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    for (auto& f : out) {
        const auto first = f.find_first_not_of(" \t");
        const auto last = f.find_last_not_of(" \t");
        f = first == std::string::npos ? std::string{} : f.substr(first, last - first + 1);
    }
    return out;
}

// Reads the header and checks it; returns false on an empty stream.
bool expect_header(std::istream& in, const std::vector<std::string>& want) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (split_fields(line) != want) {
            std::string joined;
            for (const auto& w : want) joined += (joined.empty() ? "" : ",") + w;
            fail(ErrorCode::InputError, "expected CSV header '" + joined + "'");
        }
        return true;
    }
    return false;
}

bool iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    const int month = std::stoi(s.substr(5, 2));
    const int day = std::stoi(s.substr(8, 2));
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InputError, "cannot open " + path);
    return in;
}

}  // namespace

PriceSeries read_price_series(std::istream& in) {
    if (!expect_header(in, {"date", "price"})) fail(ErrorCode::InputError, "price series CSV is empty");
    PriceSeries series;
    std::string line, last_date;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        const std::string where = "price series row " + std::to_string(row);
        if (fields.size() != 2) fail(ErrorCode::InputError, where + ": expected 2 fields");
        if (!iso_date(fields[0])) fail(ErrorCode::InputError, where + ": bad date '" + fields[0] + "'");
        if (!last_date.empty() && !(last_date < fields[0])) {
            fail(ErrorCode::InputError, where + ": dates must be strictly increasing");
        }
        last_date = fields[0];
        series.times.push_back(static_cast<double>(series.prices.size()));
        series.prices.push_back(parse_double(fields[1], "price"));
    }
    if (series.prices.empty()) fail(ErrorCode::InputError, "price series CSV has no rows");
    return series;
}

PriceSeries load_price_series(const std::string& path) {
    auto in = open(path);
    return read_price_series(in);
}

QuoteSheet read_quote_sheet(std::istream& in, double a0) {
    if (!expect_header(in, {"maturity_years", "strike", "price", "kind"})) {
        fail(ErrorCode::InputError, "quote sheet CSV is empty");
    }
    QuoteSheet sheet;
    sheet.a0 = a0;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        const std::string where = "quote row " + std::to_string(row);
        if (fields.size() != 4) fail(ErrorCode::InputError, where + ": expected 4 fields");
        Quote q;
        q.maturity = parse_double(fields[0], "maturity_years");
        q.strike = parse_double(fields[1], "strike");
        q.price = parse_double(fields[2], "price");
        if (fields[3] == "call") {
            q.kind = OptionKind::Call;
        } else if (fields[3] == "put") {
            q.kind = OptionKind::Put;
        } else {
            fail(ErrorCode::InputError, where + ": kind must be call or put");
        }
        if (!(q.maturity > 0.0 && q.strike > 0.0 && q.price > 0.0)) {
            fail(ErrorCode::InputError, where + ": maturity, strike and price must be > 0");
        }
        sheet.quotes.push_back(q);
    }
    if (sheet.quotes.empty()) fail(ErrorCode::InputError, "quote sheet CSV has no rows");
    return sheet;
}

QuoteSheet load_quote_sheet(const std::string& path, double a0) {
    auto in = open(path);
    return read_quote_sheet(in, a0);
}

}  // namespace bbsm
