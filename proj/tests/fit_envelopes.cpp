// Prints the envelope fixture: fit_envelopes > tests/fixtures/envelopes.json

#include <iostream>

#include "json.hpp"

#include "common/envelopes.hpp"

int main() {
    nlohmann::json j;
    for (const auto& f : levylt::envelopes::families()) {
        j["reference_times"][f.name] = levylt::envelopes::reference_time(f.exp);
    }
    j["u_and_w_reference_time"] = 10.0;
    j["constants"] = levylt::envelopes::fit_all({});
    std::cout << j.dump(2) << "\n";
}
