#include "qnek/report.hpp"

#include "json.hpp"

#include <sstream>

namespace qnek {

std::string reports_to_json(const std::vector<VerificationReport>& rs, bool include_timings) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : rs) {
        nlohmann::ordered_json item;
        item["id"] = r.id;
        item["outcome"] = r.outcome();
        item["max_residual"] = r.max_residual;
        item["tolerance"] = r.tolerance;
        item["settings"] = r.settings;
        item["wall_time"] = include_timings ? r.wall_time : 0.0;
        out.push_back(std::move(item));
    }
    return out.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<VerificationReport>& rs, bool include_timings) {
    std::ostringstream os;
    os << "id,outcome,max_residual,tolerance,settings,wall_time\n";
    for (const auto& r : rs) {
        std::string settings = r.settings;
        for (char& c : settings)
            if (c == ',') c = ';';
        os << r.id << ',' << r.outcome() << ',';
        os.precision(17);
        os << r.max_residual << ',' << r.tolerance << ',' << settings << ','
           << (include_timings ? r.wall_time : 0.0) << '\n';
    }
    return os.str();
}

} // namespace qnek
