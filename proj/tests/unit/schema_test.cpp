#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "plm/error.hpp"
#include "plm/network.hpp"
#include "plm/schema.hpp"
#include "plm/schema_io.hpp"

using namespace plm;

namespace {

SceneSchema two_var_schema() {
  return SceneSchema{{{"A", {"a0", "a1"}, VariableRole::factor},
                      {"B", {"no", "yes"}, VariableRole::outcome}}};
}

}  // namespace

TEST(ValidateSchema, DefaultIsValid) {
  EXPECT_TRUE(validate_schema(default_schema()).ok());
  EXPECT_TRUE(validate_schema(default_schema(OutcomeKind::true_positive)).ok());
}

TEST(ValidateSchema, DuplicateVariableName) {
  auto s = default_schema();
  s.variables.push_back({"Weather", {"x", "y"}, VariableRole::factor});
  const auto r = validate_schema(s);
  EXPECT_TRUE(r.contains(ViolationKind::duplicate_variable));
  EXPECT_NE(r.to_string().find("Weather"), std::string::npos);
}

TEST(ValidateSchema, SingleStateIsArityViolation) {
  auto s = default_schema();
  s.variables[0].states = {"clear"};
  EXPECT_TRUE(validate_schema(s).contains(ViolationKind::too_few_states));
}

TEST(ValidateSchema, DuplicateStateAndOutcomeCount) {
  auto s = two_var_schema();
  s.variables[0].states = {"a", "a"};
  EXPECT_TRUE(validate_schema(s).contains(ViolationKind::duplicate_state));

  auto none = two_var_schema();
  none.variables[1].role = VariableRole::factor;
  EXPECT_TRUE(validate_schema(none).contains(ViolationKind::no_outcome));

  auto two = two_var_schema();
  two.variables[0].role = VariableRole::outcome;
  EXPECT_TRUE(validate_schema(two).contains(ViolationKind::multiple_outcomes));
}

TEST(ValidateStructure, DefaultIsValid) {
  EXPECT_TRUE(validate_structure(default_schema(), default_structure()).ok());
}

TEST(ValidateStructure, TwoCycleIsNamed) {
  const auto s = two_var_schema();
  const auto r = validate_structure(s, structure_over(s, {{"A", "B"}, {"B", "A"}}));
  ASSERT_TRUE(r.contains(ViolationKind::cycle));
  EXPECT_NE(r.to_string().find("A -> B -> A"), std::string::npos);
}

TEST(ValidateStructure, UnknownEndpoint) {
  const auto s = default_schema();
  auto st = default_structure();
  st.edges.push_back({"Fog", "Road"});
  const auto r = validate_structure(s, st);
  EXPECT_TRUE(r.contains(ViolationKind::unknown_endpoint));
  EXPECT_NE(r.to_string().find("Fog"), std::string::npos);
}

TEST(ValidateStructure, SelfLoopDuplicateEdgeAndNodeSet) {
  const auto s = two_var_schema();
  EXPECT_TRUE(validate_structure(s, structure_over(s, {{"A", "A"}})).contains(ViolationKind::self_loop));
  EXPECT_TRUE(validate_structure(s, structure_over(s, {{"A", "B"}, {"A", "B"}}))
                  .contains(ViolationKind::duplicate_edge));
  BnStructure missing{{"A"}, {}};
  EXPECT_TRUE(validate_structure(s, missing).contains(ViolationKind::missing_node));
  BnStructure extra{{"A", "B", "C"}, {}};
  EXPECT_TRUE(validate_structure(s, extra).contains(ViolationKind::unknown_node));
}

TEST(ParentsOf, DefaultStructure) {
  const auto st = default_structure();
  EXPECT_EQ(parents_of(st, "Reflection"), (std::vector<std::string>{"Illumination", "Road"}));
  EXPECT_TRUE(parents_of(st, "Weather").empty());
  EXPECT_EQ(parents_of(st, "FN"), (std::vector<std::string>{"Occlusion", "Reflection", "Truncation"}));
  EXPECT_EQ(parents_of(default_structure(OutcomeKind::true_positive), "TP"),
            (std::vector<std::string>{"Occlusion", "Reflection", "Truncation"}));
  EXPECT_THROW(parents_of(st, "Snow"), ValidationError);
}

TEST(ParentsOf, StableAcrossCalls) {
  const auto st = default_structure();
  for (const auto& n : st.nodes) EXPECT_EQ(parents_of(st, n), parents_of(st, n));
}

TEST(TopologicalOrder, VisitsEveryNodeOnceParentsFirst) {
  const auto st = default_structure();
  const auto order = topological_order(st);
  ASSERT_TRUE(order);
  ASSERT_EQ(order->size(), st.nodes.size());
  auto pos = [&](const std::string& n) { return std::find(order->begin(), order->end(), n) - order->begin(); };
  for (const auto& n : st.nodes) EXPECT_LT(pos(n), static_cast<long>(order->size()));
  for (const auto& e : st.edges) EXPECT_LT(pos(e.parent), pos(e.child));
}

TEST(TopologicalOrder, CycleGivesNothing) {
  const auto s = two_var_schema();
  EXPECT_FALSE(topological_order(structure_over(s, {{"A", "B"}, {"B", "A"}})));
}

TEST(SchemaDocument, DefaultRoundTripsBitIdentically) {
  for (auto kind : {OutcomeKind::false_negative, OutcomeKind::true_positive}) {
    const auto text = serialize_schema_document(default_schema(kind), default_structure(kind));
    const auto doc = parse_schema_document(text);
    ASSERT_TRUE(doc.schema && doc.edges);
    EXPECT_EQ(*doc.schema, default_schema(kind));
    EXPECT_EQ(serialize_schema_document(*doc.schema, structure_over(*doc.schema, *doc.edges)), text);
  }
}

TEST(SchemaDocument, ShippedFilesMatchDefaults) {
  const std::string dir = PLM_DATA_DIR;
  EXPECT_EQ(plm::testing::read_file(dir + "/default_fn.json"),
            serialize_schema_document(default_schema(), default_structure()));
  EXPECT_EQ(plm::testing::read_file(dir + "/default_tp.json"),
            serialize_schema_document(default_schema(OutcomeKind::true_positive),
                                      default_structure(OutcomeKind::true_positive)));
}

TEST(SchemaDocument, RejectsUnknownKeysAndBadJson) {
  EXPECT_THROW(parse_schema_document(R"({"variables": [], "nodes": []})"), ValidationError);
  EXPECT_THROW(parse_schema_document(R"({"variables": [{"name": "A", "states": ["x","y"], "role": "factor", "color": 1}]})"),
               ValidationError);
  EXPECT_THROW(parse_schema_document("{not json"), ValidationError);
  EXPECT_THROW(parse_schema_document(R"({"variables": [{"name": "A", "states": ["x","y"], "role": "cause"}]})"),
               ValidationError);
}

TEST(SchemaDocument, EdgesOnlyDocument) {
  const auto doc = parse_schema_document(R"({"edges": [{"parent": "A", "child": "B"}]})");
  EXPECT_FALSE(doc.schema);
  ASSERT_TRUE(doc.edges);
  EXPECT_EQ(doc.edges->front(), (Edge{"A", "B"}));
}

TEST(SchemaDocument, MissingFileIsIoError) {
  EXPECT_THROW(read_schema_document("/nonexistent/schema.json"), IoError);
}

TEST(SchemaHash, DistinguishesSchemas) {
  EXPECT_EQ(schema_hash(default_schema(), default_structure()), schema_hash(default_schema(), default_structure()));
  EXPECT_NE(schema_hash(default_schema(), default_structure()),
            schema_hash(default_schema(OutcomeKind::true_positive), default_structure(OutcomeKind::true_positive)));
}

TEST(Network, CompileRejectsInvalidInput) {
  const auto s = two_var_schema();
  try {
    Network::compile(s, structure_over(s, {{"A", "B"}, {"B", "A"}}));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("A -> B -> A"), std::string::npos);
  }
}

TEST(Network, ParentConfigurationIndexing) {
  const auto net = Network::compile(default_schema(), default_structure());
  const auto refl = net.index_of("Reflection");
  EXPECT_EQ(net.parent_configurations(refl), 6u);
  EXPECT_EQ(net.parent_configurations(net.index_of("FN")), 12u);
  EXPECT_EQ(net.parent_configurations(net.index_of("Weather")), 1u);

  // Parents of Reflection are (Illumination, Road); Road varies fastest.
  Assignment a(net.size(), 0);
  a[net.index_of("Illumination")] = 1;  // night
  a[net.index_of("Road")] = 1;          // wet
  const auto u = net.parent_config(refl, a);
  EXPECT_EQ(u, 3u);
  EXPECT_EQ(net.describe_parent_config(refl, u), "Illumination=night,Road=wet");
  EXPECT_EQ(net.decode_parent_config(refl, u), (std::vector<StateIndex>{1, 1}));
  for (std::size_t k = 0; k < net.parent_configurations(refl); ++k) {
    const auto states = net.decode_parent_config(refl, k);
    Assignment b(net.size(), 0);
    b[net.index_of("Illumination")] = states[0];
    b[net.index_of("Road")] = states[1];
    EXPECT_EQ(net.parent_config(refl, b), k);
  }
  EXPECT_EQ(net.joint_size(), 3u * 2 * 3 * 2 * 3 * 2 * 2);
  EXPECT_EQ(net.variable(net.outcome()).name, "FN");
}

TEST(Network, UnknownNamesThrow) {
  const auto net = Network::compile(default_schema(), default_structure());
  EXPECT_THROW(net.index_of("Snow"), ValidationError);
  EXPECT_THROW(net.state_of(net.index_of("Weather"), "snow"), ValidationError);
}
