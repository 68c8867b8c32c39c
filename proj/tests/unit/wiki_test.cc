#include "cruciverba/wiki.h"

#include <gtest/gtest.h>

#include "cruciverba/error.h"
#include "cruciverba/text.h"
#include "test_support.h"

namespace cruciverba {
namespace {

using testing::ScriptedTransport;
using testing::TempDir;

RawArticle raw(std::string html) {
  RawArticle r;
  r.title = "Prova";
  r.html = std::move(html);
  return r;
}

RawArticle fixture_page() {
  RawArticle r;
  r.title = "Uzbekistan";
  r.html = read_file(testing::data_dir() / "fixtures/source/wiki/Uzbekistan.html");
  return r;
}

http::RetryPolicy quiet_retry() {
  http::RetryPolicy p;
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::string parse_body(const std::string& html) {
  return nlohmann::json{{"parse", {{"title", "Roma"}, {"text", html}}}}.dump();
}

TEST(ExtractIntro, SingleParagraph) {
  EXPECT_EQ(extract_intro(raw("<p>Roma è la capitale.</p>")), "Roma è la capitale.");
}

TEST(ExtractIntro, ZeroParagraphsGiveEmpty) {
  EXPECT_EQ(extract_intro(raw("<div>nulla</div><h2>Storia</h2>")), "");
}

TEST(ExtractIntro, StopsAtFirstHeading) {
  EXPECT_EQ(extract_intro(raw("<p>Uno.</p><p>Due.</p><h2>Storia</h2><p>Tre.</p>")), "Uno. Due.");
}

TEST(ExtractIntro, FixturePage) {
  const std::string expected =
      "L'Uzbekistan, ufficialmente Repubblica dell'Uzbekistan (in uzbeco O'zbekiston Respublikasi), è uno stato "
      "dell'Asia centrale privo di sbocco sul mare. Confina con il Kazakistan a nord, con il Tagikistan e il "
      "Kirghizistan a est, con l'Afghanistan a sud e con il Turkmenistan a sud-ovest. La capitale e città più "
      "popolosa è Tashkent. Il territorio fu attraversato dalla Via della seta e ospita città storiche come "
      "Samarcanda, Bukhara e Khiva, oggi patrimonio dell'umanità. Dopo secoli di dominio di khanati ed emirati, la "
      "regione entrò nell'Impero russo e poi nell'Unione Sovietica, da cui ottenne l'indipendenza nel 1991. "
      "L'economia si basa sull'estrazione di gas naturale e oro e sulla coltivazione del cotone, di cui il paese è "
      "tra i maggiori esportatori.";
  EXPECT_EQ(extract_intro(fixture_page()), expected);
}

TEST(ExtractIntro, RemovesCitationMarkers) {
  EXPECT_EQ(extract_intro(raw("<p>Testo[1] con note[23][nota 2] finali.[senza fonte]</p>")),
            "Testo con note finali.");
  EXPECT_EQ(strip_citation_markers("a[1] b[12]"), "a b");
  EXPECT_EQ(strip_citation_markers("vettore [xy]"), "vettore [xy]");
}

TEST(ExtractIntro, DropsMarkupKeepsEscapedText) {
  const std::string intro = extract_intro(raw("<p>a <i>b</i> <span class=\"x\">c</span></p>"));
  EXPECT_EQ(intro, "a b c");
  EXPECT_EQ(extract_intro(raw("<p>&lt;d&gt;</p>")), "<d>");
}

TEST(ExtractIntro, MalformedHtmlIsParseFailure) {
  EXPECT_EQ(code_of([] { extract_intro(raw("<p>testo <b")); }), ErrorCode::kParseFailure);
}

TEST(BoldKeywords, FixturePage) {
  const std::vector<std::string> expected = {"Uzbekistan", "Repubblica dell'Uzbekistan", "O'zbekiston Respublikasi",
                                             "Via della seta", "cotone"};
  EXPECT_EQ(extract_bold_keywords(fixture_page()), expected);
}

TEST(BoldKeywords, OnlyIntroRegion) {
  const auto kws = extract_bold_keywords(raw("<table><tr><td><b>Info</b></td></tr></table>"
                                             "<p><b>Roma</b> città</p><h2>x</h2><p><b>Lazio</b></p>"));
  EXPECT_EQ(kws, std::vector<std::string>{"Roma"});
}

TEST(BoldKeywords, NoneAndDuplicates) {
  EXPECT_TRUE(extract_bold_keywords(raw("<p>niente grassetto</p>")).empty());
  EXPECT_EQ(extract_bold_keywords(raw("<p><b> Roma </b> e <strong>Roma</strong></p>")),
            std::vector<std::string>{"Roma"});
}

TEST(BoldKeywords, SubsetOfIntro) {
  const RawArticle page = fixture_page();
  const std::string intro = text::normalize_whitespace(extract_intro(page));
  for (const auto& kw : extract_bold_keywords(page)) {
    EXPECT_NE(intro.find(text::normalize_whitespace(kw)), std::string::npos) << kw;
  }
}

TEST(ArticleJson, RoundTrip) {
  ArticleRecord a;
  a.title = "Roma";
  a.intro_text = "Roma è la capitale.";
  a.bold_keywords = {"Roma"};
  a.view_count = 7;
  a.view_count_available = true;
  a.summary = "capitale";
  a.categories = {"Capitali"};
  a.url = "https://it.wikipedia.org/wiki/Roma";
  a.relevance = "alta";
  EXPECT_EQ(article_from_json(to_json(a)), a);
}

TEST(WikiEndpointUrls, EncodeTitles) {
  WikiEndpoint ep;
  EXPECT_NE(ep.parse_url("South Ribble").find("page=South%20Ribble"), std::string::npos);
  EXPECT_NE(ep.pageviews_url("South Ribble").find("/it.wikipedia.org/all-access/user/South_Ribble/monthly/"),
            std::string::npos);
}

TEST(WikiClient, EmptyTitleRejected) {
  WikiClient client(nullptr, nullptr, WikiEndpoint{});
  EXPECT_EQ(code_of([&] { client.fetch_article(""); }), ErrorCode::kNotFound);
}

TEST(WikiClient, ReplayFixtureHasBoldTitle) {
  TempDir dir;
  auto transport = std::make_shared<http::ReplayTransport>(testing::replay_dir());
  WikiClient client(transport, std::make_shared<ArticleCache>(dir / "cache"), WikiEndpoint{}, quiet_retry());
  const RawArticle page = client.fetch_article("Uzbekistan");
  EXPECT_EQ(page.title, "Uzbekistan");
  EXPECT_NE(page.html.find("<b>Uzbekistan</b>"), std::string::npos);
}

TEST(WikiClient, ReplayMetadata) {
  TempDir dir;
  auto transport = std::make_shared<http::ReplayTransport>(testing::replay_dir());
  WikiClient client(transport, std::make_shared<ArticleCache>(dir / "cache"), WikiEndpoint{}, quiet_retry());
  const ArticleRecord rec = client.extract_metadata(client.fetch_article("Uzbekistan"));
  EXPECT_EQ(rec.view_count, 1234u);
  EXPECT_TRUE(rec.view_count_available);
  EXPECT_EQ(rec.categories, (std::vector<std::string>{"Stati asiatici", "Uzbekistan"}));
  EXPECT_EQ(rec.summary, "stato dell'Asia centrale");
  EXPECT_EQ(rec.bold_keywords.front(), "Uzbekistan");
}

TEST(WikiClient, ReplayMissingPageIsNotFound) {
  TempDir dir;
  auto transport = std::make_shared<http::ReplayTransport>(testing::replay_dir());
  WikiClient client(transport, std::make_shared<ArticleCache>(dir / "cache"), WikiEndpoint{}, quiet_retry());
  EXPECT_EQ(code_of([&] { client.fetch_article("Pagina inesistente"); }), ErrorCode::kNotFound);
}

TEST(WikiClient, SecondFetchServedFromCache) {
  TempDir dir;
  auto transport = std::make_shared<ScriptedTransport>();
  transport->push(200, parse_body("<p><b>Roma</b> è la capitale.</p>"));
  WikiClient client(transport, std::make_shared<ArticleCache>(dir / "cache"), WikiEndpoint{}, quiet_retry());
  const RawArticle first = client.fetch_article("Roma");
  const RawArticle second = client.fetch_article("Roma");
  EXPECT_EQ(first, second);
  EXPECT_EQ(transport->requests.size(), 1u);
  EXPECT_EQ(transport->requests[0].headers.at("User-Agent"), WikiEndpoint{}.user_agent);

  WikiClient offline(nullptr, std::make_shared<ArticleCache>(dir / "cache"), WikiEndpoint{});
  EXPECT_EQ(offline.fetch_article("Roma"), first);
}

TEST(WikiClient, ErrorMapping) {
  TempDir dir;
  auto transport = std::make_shared<ScriptedTransport>();
  WikiClient client(transport, std::make_shared<ArticleCache>(dir / "cache"), WikiEndpoint{}, quiet_retry());

  transport->push(404, "{}");
  EXPECT_EQ(code_of([&] { client.fetch_article("A"); }), ErrorCode::kNotFound);

  transport->push(200, R"({"error":{"code":"missingtitle"}})");
  EXPECT_EQ(code_of([&] { client.fetch_article("B"); }), ErrorCode::kNotFound);

  for (int i = 0; i < 3; ++i) transport->push(429, "{}");
  EXPECT_EQ(code_of([&] { client.fetch_article("C"); }), ErrorCode::kRateLimited);

  for (int i = 0; i < 3; ++i) transport->fail(ErrorCode::kNetwork);
  EXPECT_EQ(code_of([&] { client.fetch_article("D"); }), ErrorCode::kNetwork);
  EXPECT_EQ(transport->remaining(), 0u);
}

TEST(WikiClient, MetadataDegradesWhenEndpointsFail) {
  TempDir dir;
  auto transport = std::make_shared<ScriptedTransport>();
  for (int i = 0; i < 3; ++i) transport->push(503, "down");
  transport->push(200, R"({"query":{"pages":[{"title":"Roma"}]}})");
  WikiClient client(transport, std::make_shared<ArticleCache>(dir / "cache"), WikiEndpoint{}, quiet_retry());
  const ArticleRecord rec = client.extract_metadata(raw("<p><b>Roma</b> è la capitale. Altro.</p>"));
  EXPECT_EQ(rec.view_count, 0u);
  EXPECT_FALSE(rec.view_count_available);
  EXPECT_TRUE(rec.categories.empty());
  EXPECT_EQ(rec.summary, "Roma è la capitale.");
}

TEST(ArticleCache, ContentAddressedLayout) {
  TempDir dir;
  ArticleCache cache(dir.path());
  const auto p = cache.path_for("page:Roma");
  EXPECT_EQ(p.parent_path().filename().string().size(), 2u);
  EXPECT_EQ(p.parent_path().filename().string(), sha256_hex("page:Roma").substr(0, 2));
  EXPECT_FALSE(cache.load_blob("x"));
  cache.store_blob("x", "contenuto");
  EXPECT_EQ(cache.load_blob("x").value(), "contenuto");
}

TEST(ArticleFromText, NoKeywordsOrMetadata) {
  const ArticleRecord a = article_from_text("Testo", "  uno \n due ");
  EXPECT_EQ(a.intro_text, "uno due");
  EXPECT_TRUE(a.bold_keywords.empty());
  EXPECT_FALSE(a.view_count_available);
}

}  // namespace
}  // namespace cruciverba
