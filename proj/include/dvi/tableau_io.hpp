#pragma once

#include <string>

#include "dvi/glm.hpp"

namespace dvi {

// Tableau documents: {"s": int, "r": int, "A": [[...]], "U": ..., "B": ...,
// "V": ...}, matrices as arrays of rows. An optional "id" string is kept.
// Missing fields, ragged rows, non-numeric entries and shape disagreements
// throw InputError; messages name the field and, where known, the line.
Tableau parse_tableau(const std::string& text);
Tableau load_tableau(const std::string& path);
std::string tableau_to_json(const Tableau& tab);

}  // namespace dvi
