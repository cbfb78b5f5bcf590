fn main() {
    std::fs::write("/tmp/corpus_article.pdf", pdfglot::corpus::two_column_article(10)).unwrap();
    for (name, bytes) in pdfglot::corpus::golden_corpus() {
        std::fs::write(format!("/tmp/corpus_{name}.pdf"), bytes).unwrap();
    }
    println!("written");
}
