#include <doctest.h>

#include "mvd/ifc/schema.hpp"
#include "support/helpers.hpp"

using namespace mvd;

TEST_CASE("IFC4 table loads with expected layouts") {
    const ifc::SchemaTable& t = test::schemas().get("IFC4");
    CHECK(t.schema_id() == "IFC4");

    const ifc::EntityDef& wall = t.entity("IfcWall");
    REQUIRE(wall.supertype.has_value());
    CHECK(*wall.supertype == "IfcBuildingElement");
    // GlobalId, OwnerHistory, Name, Description, ObjectType, ObjectPlacement,
    // Representation, Tag, PredefinedType
    CHECK(wall.effective_attributes.size() == 9);
    CHECK(wall.effective_attributes[2].name == "Name");
    CHECK(wall.effective_attributes[8].name == "PredefinedType");

    CHECK(t.entity("IfcProject").effective_attributes.size() == 9);
    CHECK(t.entity("IfcPropertySet").effective_attributes.size() == 5);
    CHECK(t.entity("IfcPropertySingleValue").effective_attributes.size() == 4);
    CHECK(t.entity("IfcRelDefinesByProperties").effective_attributes.size() == 6);
    CHECK(t.entity("IfcRelDefinesByType").effective_attributes.size() == 6);
    CHECK(t.entity("IfcTypeObject").effective_attributes.size() == 6);
    CHECK(t.entity("IfcWallType").effective_attributes.size() == 10);
    CHECK(t.entity("IfcOwnerHistory").effective_attributes.size() == 8);

    CHECK(t.is_subtype("IfcWall", "IfcProduct"));
    CHECK(t.is_subtype("IfcWall", "IfcWall"));
    CHECK_FALSE(t.is_subtype("IfcProduct", "IfcWall"));
    CHECK(t.is_subtype("IfcWallStandardCase", "IfcBuildingElement"));

    // Entity lookup is case-insensitive.
    CHECK(t.find_entity("IFCWALL") == &wall);
    CHECK(t.find_entity("ifcwall") == &wall);

    // IFC4 objects carry both IsDefinedBy and IsTypedBy.
    const ifc::EntityDef& obj = t.entity("IfcObject");
    CHECK(t.find_inverse(obj, "IsDefinedBy") != nullptr);
    CHECK(t.find_inverse(obj, "IsTypedBy") != nullptr);
}

TEST_CASE("IFC2X3 table differs in the known places") {
    const ifc::SchemaTable& t = test::schemas().get("IFC2X3");
    CHECK(t.entity("IfcWall").effective_attributes.size() == 8);  // no PredefinedType
    const ifc::EntityDef& obj = t.entity("IfcObject");
    CHECK(t.find_inverse(obj, "IsDefinedBy") != nullptr);
    CHECK(t.find_inverse(obj, "IsTypedBy") == nullptr);
    // IsDefinedBy routes through the abstract IfcRelDefines in 2x3.
    CHECK(t.find_inverse(obj, "IsDefinedBy")->source_entity == "IfcRelDefines");
    CHECK(t.is_subtype("IfcRelDefinesByType", "IfcRelDefines"));
    CHECK(t.entity("IfcProject").effective_attributes.size() == 9);
}

TEST_CASE("select membership and constraint matching") {
    const ifc::SchemaTable& t = test::schemas().get("IFC4");
    CHECK(t.matches_constraint("IfcBoolean", "IfcValue"));
    CHECK(t.matches_constraint("IfcLabel", "IfcValue"));
    CHECK_FALSE(t.matches_constraint("IfcWall", "IfcValue"));
    CHECK(t.matches_constraint("IfcWall", "ifcwall"));
    CHECK(t.matches_constraint("IfcMaterial", "IfcMaterialSelect"));
    CHECK(t.matches_constraint("IfcAxis2Placement3D", "IfcAxis2Placement"));

    auto walls = t.subtype_closure(*t.entity_index("IfcWall"));
    CHECK(walls.size() == 2);  // IfcWall + IfcWallStandardCase
}

TEST_CASE("attribute resolution walks inheritance and selects") {
    const ifc::SchemaTable& t = test::schemas().get("IFC4");
    auto name = t.resolve_attribute("IfcWall", "Name");
    REQUIRE(name.has_value());
    CHECK(name->declared_type == "IfcLabel");
    CHECK_FALSE(name->is_inverse);

    auto inv = t.resolve_attribute("IfcWall", "IsDefinedBy");
    REQUIRE(inv.has_value());
    CHECK(inv->is_inverse);
    CHECK(inv->declared_type == "IfcRelDefinesByProperties");

    CHECK_FALSE(t.resolve_attribute("IfcWall", "NoSuchAttr").has_value());

    auto names = t.attribute_names("IfcWall");
    CHECK(std::find(names.begin(), names.end(), "PredefinedType") != names.end());
}

TEST_CASE("schema table error reporting") {
    using ifc::SchemaTable;
    CHECK_THROWS_AS(SchemaTable::load_text("schema-table 1\n"), ifc::SchemaError);

    const char* cyclic =
        "schema-table 1\nschema X\n"
        "entity A supertype B\nentity B supertype A\n";
    CHECK_THROWS_WITH_AS(SchemaTable::load_text(cyclic),
                         doctest::Contains("supertype cycle"), ifc::SchemaError);

    const char* self_cycle = "schema-table 1\nschema X\nentity A supertype A\n";
    CHECK_THROWS_AS(SchemaTable::load_text(self_cycle), ifc::SchemaError);

    const char* dangling_inverse =
        "schema-table 1\nschema X\n"
        "entity A\n  inverse Bad B Missing\n"
        "entity B\n";
    CHECK_THROWS_WITH_AS(SchemaTable::load_text(dangling_inverse),
                         doctest::Contains("does not exist"), ifc::SchemaError);

    const char* unknown_attr_type =
        "schema-table 1\nschema X\nentity A\n  attr F Nope req\n";
    CHECK_THROWS_WITH_AS(SchemaTable::load_text(unknown_attr_type),
                         doctest::Contains("unknown type"), ifc::SchemaError);
}

TEST_CASE("mini schema has exactly fifteen entities") {
    const ifc::SchemaTable& t = test::schemas().get("IFCMINI");
    CHECK(t.entity_count() == 15);
    CHECK(t.has_entity("IfcRelationship"));
    CHECK(t.entity("IfcRelationship").is_abstract);
}
