// Placeholder main; replaced by the full CLI once the training stack lands.
int main() { return 0; }
