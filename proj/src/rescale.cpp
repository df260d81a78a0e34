#include "randbc/rescale.hpp"

namespace randbc {

ScalingSchedule default_schedule() {
    return {ScalingStep::outside, ScalingStep::inside, ScalingStep::outside, ScalingStep::inside};
}

ScalingSchedule parse_schedule(std::string_view text) {
    ScalingSchedule out;
    for (char c : text) {
        if (c == 'O' || c == 'o')
            out.push_back(ScalingStep::outside);
        else if (c == 'I' || c == 'i')
            out.push_back(ScalingStep::inside);
        else
            throw std::invalid_argument("scaling schedule must consist of O and I letters, got '" +
                                        std::string(text) + "'");
    }
    return out;
}

std::string schedule_name(const ScalingSchedule& schedule) {
    std::string out;
    for (ScalingStep s : schedule) out.push_back(s == ScalingStep::outside ? 'O' : 'I');
    return out;
}

}  // namespace randbc
