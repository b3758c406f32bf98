public class Histogram {
    // Assembled in the goto-to-condition loop layout of older compilers.
    public static void histogram(int[] data, int[] hist, int n) {
        for (int i = 0; i < n; i++)
            hist[data[i]]++;
    }
}
