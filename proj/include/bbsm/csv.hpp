#pragma once

#include <iosfwd>
#include <string>

#include "bbsm/calibration.hpp"

namespace bbsm {

// "date,price" with ISO dates; observation i is placed at trading day i.
PriceSeries read_price_series(std::istream& in);
PriceSeries load_price_series(const std::string& path);

// "maturity_years,strike,price,kind", kind in {call, put}.
QuoteSheet read_quote_sheet(std::istream& in, double a0);
QuoteSheet load_quote_sheet(const std::string& path, double a0);

}  // namespace bbsm
