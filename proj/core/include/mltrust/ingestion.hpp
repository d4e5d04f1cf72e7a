#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mltrust/model.hpp"

namespace mltrust {

enum class LocationCategory { kUrban, kSuburban, kRural };

std::string_view location_name(LocationCategory category);

struct DoctorRecord {
  std::string id;
  std::string name;
  std::set<std::string> hospital_ids;
  std::set<std::string> department_ids;
  std::optional<double> qualification_score;
  std::optional<double> overall_experience_years;
  std::optional<double> specialist_experience_years;
  std::optional<double> like_pct;
  std::int64_t vote_count = 0;
  std::int64_t review_count = 0;
  bool verified = false;
  bool claimed = false;

  bool operator==(const DoctorRecord&) const = default;
};

struct HospitalRecord {
  std::string id;
  std::string name;
  std::optional<double> rating;
  std::int64_t stories_count = 0;
  std::optional<std::string> accreditation;
  std::optional<LocationCategory> location_category;
  std::set<std::string> department_ids;
  // Explicit doctor counts ("D1:3" in the CSV cell). When present they
  // define the whole A^[hd] row and unlisted departments get 0; otherwise the
  // row is counted from the doctor table.
  std::map<std::string, double> department_doctor_counts;

  bool operator==(const HospitalRecord&) const = default;
};

struct DepartmentRecord {
  std::string id;
  std::string name;
  std::set<std::string> doctor_ids;
  // Explicit belongs-to weight for a listed doctor ("P1:8" in the CSV cell).
  // Doctors without an entry use their qualification score.
  std::map<std::string, double> doctor_weights;
  std::set<std::string> hospital_ids;
  // Computed by clean(); never read from input.
  std::optional<double> derived_rating;

  bool operator==(const DepartmentRecord&) const = default;
};

struct Provenance {
  std::size_t raw_doctors = 0;
  std::size_t raw_hospitals = 0;
  std::size_t raw_departments = 0;
  std::optional<std::size_t> filtered_doctors;
  std::optional<std::size_t> filtered_hospitals;
  std::optional<std::size_t> filtered_departments;

  bool operator==(const Provenance&) const = default;
};

struct EntityStore {
  std::map<std::string, DoctorRecord> doctors;
  std::map<std::string, HospitalRecord> hospitals;
  std::map<std::string, DepartmentRecord> departments;
  Provenance provenance;

  bool operator==(const EntityStore&) const = default;
};

// Loads the three entity CSVs. Referential integrity is not enforced here.
EntityStore parse_store(const std::filesystem::path& doctor_file,
                        const std::filesystem::path& hospital_file,
                        const std::filesystem::path& department_file);

EntityStore parse_store(std::istream& doctors, std::istream& hospitals,
                        std::istream& departments);

void write_store(const EntityStore& store, std::ostream& doctors,
                 std::ostream& hospitals, std::ostream& departments);

// Applies the cleaning rules until a fixpoint:
//  - doctors that are unclaimed, unverified, or missing a required field
//    (hospital_ids, department_ids, qualification_score,
//    overall_experience_years) are dropped;
//  - unrated hospitals are dropped;
//  - dangling ids are removed from every membership set;
//  - departments left without doctors are dropped.
// Afterwards every department gets its derived rating.
EntityStore clean(EntityStore store);

// Linear map of a like percentage onto the 0-5 rating scale.
double like_pct_to_rating(double like_pct);

double derive_department_rating(const DepartmentRecord& dept, const EntityStore& store);

// Membership views that merge both directions of the belongs-to relation.
std::set<std::string> department_doctors(const EntityStore& store,
                                         const DepartmentRecord& dept);
std::set<std::string> hospital_departments(const EntityStore& store,
                                           const HospitalRecord& hospital);

// Ground-truth ratings and raw baseline features for one layer, in canonical
// node order.
struct LayerProfile {
  LayerId layer = LayerId::kHospital;
  std::vector<std::string> ids;
  std::vector<std::optional<double>> ratings;
  std::map<std::string, std::vector<double>> features;
};

LayerProfile layer_profile(const EntityStore& store, LayerId layer);

}  // namespace mltrust
