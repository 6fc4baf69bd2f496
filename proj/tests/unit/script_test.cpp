#include <gtest/gtest.h>

#include "actbench/script.hpp"
#include "generators.hpp"

using namespace actbench::script;

TEST(ParseScript, SingleClick) {
  auto s = parse_script("pyautogui.click(100, 200)");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.actions[0], Action::mouse(ActionName::kClick, {100, 200}));
}

TEST(ParseScript, HotkeyThenWrite) {
  auto s = parse_script("pyautogui.hotkey('ctrl','c')\npyautogui.write('hello')");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.actions[0], Action::keys(ActionName::kHotkey, {"ctrl", "c"}));
  EXPECT_EQ(s.actions[1], Action::write("hello"));
}

TEST(ParseScript, UnknownCallee) {
  try {
    parse_script("pyautogui.clickk(5,5)");
    FAIL() << "expected UnknownAction";
  } catch (const UnknownAction& e) {
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(ParseScript, DragToMatchesHandBuiltCall) {
  // Reference parse assembled directly from the grammar: callee, two numbers.
  Call expected{1, "dragTo", {NumberLiteral{30, true}, NumberLiteral{4, true}}};
  Call got = parse_call("pyautogui.dragTo(30, 4)", 1);
  EXPECT_EQ(got.callee, expected.callee);
  EXPECT_EQ(got.args, expected.args);
  auto s = parse_script("pyautogui.dragTo(30, 4)");
  EXPECT_EQ(s.actions[0].name, ActionName::kDragTo);
  EXPECT_EQ(s.actions[0].coordinate(), (Coordinate{30, 4}));
}

TEST(ParseScript, AllTenFamilies) {
  auto s = parse_script(
      "pyautogui.click(1, 2)\n"
      "pyautogui.doubleClick(3, 4)\n"
      "pyautogui.rightClick(5, 6)\n"
      "pyautogui.moveTo(7, 8)\n"
      "pyautogui.dragTo(9, 10)\n"
      "pyautogui.scroll(-3)\n"
      "pyautogui.hscroll(4)\n"
      "pyautogui.press('Enter')\n"
      "pyautogui.hotkey('Ctrl', 'Shift', 'T')\n"
      "pyautogui.write(\"hi there\")\n");
  ASSERT_EQ(s.size(), 10u);
  for (std::size_t i = 0; i < kAllActions.size(); ++i) EXPECT_EQ(s.actions[i].name, kAllActions[i]);
  EXPECT_EQ(s.actions[5].amount(), -3);
  EXPECT_EQ(s.actions[7].key_list(), KeyList{"enter"});
  EXPECT_EQ(s.actions[8].key_list(), (KeyList{"ctrl", "shift", "t"}));
}

TEST(ParseScript, TypewriteAliasesWrite) {
  auto s = parse_script("pyautogui.typewrite('abc')");
  EXPECT_EQ(s.actions[0], Action::write("abc"));
  EXPECT_EQ(serialize_script(s), "pyautogui.write('abc')");
}

TEST(ParseScript, DecimalCoordinatesKeptExact) {
  auto s = parse_script("pyautogui.click(100.25, 7.5)");
  EXPECT_EQ(s.actions[0].coordinate(), (Coordinate{100.25, 7.5}));
  EXPECT_EQ(serialize_script(s), "pyautogui.click(100.25, 7.5)");
}

TEST(ParseScript, CommentsAndBlankLinesIgnored) {
  auto s = parse_script("# open search\n\n  pyautogui.click(1, 1)  \r\n# done\n");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.actions[0].name, ActionName::kClick);
}

TEST(ParseScript, PositionFidelityUsesSourceLines) {
  try {
    parse_script("# c\npyautogui.click(1, 1)\n\npyautogui.click(1)");
    FAIL();
  } catch (const ArityError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(ParseScript, EscapesInStrings) {
  auto s = parse_script(R"(pyautogui.write('it\'s a "test"\n'))");
  EXPECT_EQ(s.actions[0].text(), "it's a \"test\"\n");
  EXPECT_EQ(parse_script(serialize_script(s)), s);
}

TEST(ParseScript, EmptyScriptRejected) {
  EXPECT_THROW(parse_script("# nothing\n"), SyntaxError);
  EXPECT_THROW(parse_script(""), SyntaxError);
}

TEST(SerializeScript, CanonicalForm) {
  ActionScript s;
  s.actions.push_back(Action::mouse(ActionName::kClick, {1, 2}));
  EXPECT_EQ(serialize_script(s), "pyautogui.click(1, 2)");
}

TEST(SerializeScript, KeyOrderPreserved) {
  ActionScript s;
  s.actions.push_back(Action::keys(ActionName::kHotkey, {"ctrl", "c"}));
  EXPECT_EQ(serialize_script(s), "pyautogui.hotkey('ctrl', 'c')");
  s.actions[0] = Action::keys(ActionName::kHotkey, {"c", "ctrl"});
  EXPECT_EQ(serialize_script(s), "pyautogui.hotkey('c', 'ctrl')");
}

TEST(SerializeScript, RoundTripsParserExamples) {
  for (const char* text : {"pyautogui.click(100, 200)", "pyautogui.hotkey('ctrl','c')\npyautogui.write('hello')",
                           "pyautogui.dragTo(30, 4)", "pyautogui.scroll(-10)\npyautogui.hscroll(+2)"}) {
    auto s = parse_script(text);
    EXPECT_EQ(parse_script(serialize_script(s)), s) << text;
  }
}

TEST(ValidateSyntax, ValidTwoLines) {
  EXPECT_TRUE(validate_syntax("pyautogui.click(1, 2)\npyautogui.press('enter')").ok());
}

TEST(ValidateSyntax, ArityAtLineOne) {
  auto v = validate_syntax("pyautogui.click(100)");
  ASSERT_EQ(v.errors.size(), 1u);
  EXPECT_EQ(v.errors[0].line, 1);
  EXPECT_EQ(v.errors[0].kind, ErrorKind::kArity);
}

TEST(ValidateSyntax, ReportsEveryBadLine) {
  auto v = validate_syntax("pyautogui.click(1, 2)\npyautogui.clik(1, 2)\npyautogui.write(3)\n");
  ASSERT_EQ(v.errors.size(), 2u);
  EXPECT_EQ(v.errors[0].line, 2);
  EXPECT_EQ(v.errors[0].kind, ErrorKind::kUnknownAction);
  EXPECT_EQ(v.errors[1].line, 3);
  EXPECT_EQ(v.errors[1].kind, ErrorKind::kArity);
}

TEST(ValidateSyntax, AgreesWithParser) {
  actbench::testkit::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string text = serialize_script(actbench::testkit::random_script(rng));
    if (i % 3 == 0) text.insert(text.size() / 2, "(");
    bool parsed = true;
    try {
      parse_script(text);
    } catch (const ScriptError&) {
      parsed = false;
    }
    EXPECT_EQ(validate_syntax(text).ok(), parsed) << text;
  }
}

TEST(Placeholders, OnlyInLabeledMode) {
  EXPECT_THROW(parse_call("pyautogui.click(<search-bar>)", 1), SyntaxError);
  Call c = parse_call("pyautogui.click(< search-bar >)", 1, {.allow_placeholders = true});
  ASSERT_EQ(c.args.size(), 1u);
  EXPECT_EQ(std::get<Placeholder>(c.args[0]).label, "search-bar");
  EXPECT_THROW(to_action(c), ArityError);
}

TEST(RoundTrip, GeneratedScripts) {
  actbench::testkit::Rng rng(42);
  for (std::size_t i = 0; i < 2000; ++i) {
    auto s = actbench::testkit::covering_script(rng, i);
    auto text = serialize_script(s);
    auto reparsed = parse_script(text);
    ASSERT_EQ(reparsed, s) << text;
    ASSERT_EQ(serialize_script(reparsed), text);
  }
}

TEST(ClosedSet, CalleesOutsideTheSetAreRejected) {
  for (const char* name : {"screenshot", "mouseDown", "keyDown", "sleep", "Click", "hotKey", "typeWrite"}) {
    std::string text = std::string("pyautogui.") + name + "(1, 2)";
    EXPECT_THROW(parse_script(text), UnknownAction) << name;
  }
}
